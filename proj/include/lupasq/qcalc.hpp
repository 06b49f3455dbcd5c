#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lupasq {

enum class Regime { SubCritical, Classical, SuperCritical };

/// Validated deformation parameter q > 0.
class QParam {
public:
    explicit QParam(double q) : q_(q) {
        if (!(q > 0.0) || !std::isfinite(q))
            throw std::domain_error("QParam: q must be a finite positive real, got " +
                                    std::to_string(q));
    }
    double value() const { return q_; }
    Regime regime() const {
        if (q_ < 1.0) return Regime::SubCritical;
        if (q_ > 1.0) return Regime::SuperCritical;
        return Regime::Classical;
    }
    QParam reciprocal() const { return QParam(1.0 / q_); }

private:
    double q_;
};

namespace detail {

/// base^e by binary exponentiation, e >= 0. Overflow propagates as +inf.
double pow_int(double base, long long e);

/// Running product kept as mantissa * 2^exponent so that intermediate
/// factors of wildly different magnitude never overflow or underflow.
struct ScaledProduct {
    double mantissa = 1.0;
    long exponent = 0;

    void multiply(double f) {
        int e = 0;
        mantissa = std::frexp(mantissa * f, &e);
        exponent += e;
    }
    void divide(double f) { multiply(1.0 / f); }
    double value() const {
        if (mantissa == 0.0) return 0.0;
        if (exponent > 1100) return mantissa > 0 ? HUGE_VAL : -HUGE_VAL;
        if (exponent < -1100) return 0.0;
        return std::ldexp(mantissa, static_cast<int>(exponent));
    }
};

} // namespace detail

/// [n]_q = 1 + q + ... + q^{n-1}, [0]_q = 0.
double q_integer(const QParam& q, long long n);

/// log([n]_q), n >= 1; stable for every q > 0 including huge q^n.
double q_integer_log(const QParam& q, long long n);

/// [n]_q! = [1][2]...[n]. Throws std::range_error if the product overflows.
double q_factorial(const QParam& q, long long n);

/// Gaussian binomial [n]!/([k]![n-k]!), computed as the ratio product
/// prod_{j=1..k} [n-k+j]/[j]; switches to a log-domain sum for n > 300.
double q_binomial(const QParam& q, long long n, long long k);

} // namespace lupasq
