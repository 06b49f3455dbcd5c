#include "lupasq/qcalc.hpp"

namespace lupasq {

namespace detail {

double pow_int(double base, long long e) {
    double r = 1.0, b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

} // namespace detail

namespace {

void require_nonnegative(long long n, const char* who) {
    if (n < 0) throw std::domain_error(std::string(who) + ": n must be >= 0");
}

// Catastrophic cancellation strikes (1-q^n)/(1-q) near q = 1; inside this
// band the geometric form loses every significant digit while the direct
// sum stays exact to a few ulp.
constexpr double kNearOneBand = 1e-8;
constexpr long long kDirectSumCap = 1 << 21;

} // namespace

double q_integer(const QParam& q, long long n) {
    require_nonnegative(n, "q_integer");
    if (n == 0) return 0.0;
    const double qv = q.value();
    if (qv == 1.0) return static_cast<double>(n);
    if (std::fabs(1.0 - qv) < kNearOneBand && n <= kDirectSumCap) {
        double sum = 0.0, p = 1.0;
        for (long long i = 0; i < n; ++i) {
            sum += p;
            p *= qv;
        }
        return sum;
    }
    return (1.0 - detail::pow_int(qv, n)) / (1.0 - qv);
}

double q_integer_log(const QParam& q, long long n) {
    if (n < 1) throw std::domain_error("q_integer_log: n must be >= 1");
    const double qv = q.value();
    if (qv == 1.0) return std::log(static_cast<double>(n));
    if (std::fabs(1.0 - qv) < kNearOneBand && n <= kDirectSumCap)
        return std::log(q_integer(q, n));
    if (qv < 1.0)
        return std::log1p(-detail::pow_int(qv, n)) - std::log1p(-qv);
    // q > 1: [n] = q^n (1 - q^{-n}) / (q - 1)
    return static_cast<double>(n) * std::log(qv) +
           std::log1p(-detail::pow_int(1.0 / qv, n)) - std::log(qv - 1.0);
}

double q_factorial(const QParam& q, long long n) {
    require_nonnegative(n, "q_factorial");
    double r = 1.0;
    for (long long i = 1; i <= n; ++i) {
        r *= q_integer(q, i);
        if (!std::isfinite(r))
            throw std::range_error("q_factorial: product overflows double at n = " +
                                   std::to_string(i) + "; use the log-domain routines");
    }
    return r;
}

double q_binomial(const QParam& q, long long n, long long k) {
    require_nonnegative(n, "q_binomial");
    if (k < 0 || k > n)
        throw std::domain_error("q_binomial: k must satisfy 0 <= k <= n");
    if (k == 0 || k == n) return 1.0;

    if (q.value() == 1.0) {
        // Multiply-then-divide keeps every intermediate an exact integer
        // while it fits in the 53-bit mantissa.
        double c = 1.0;
        for (long long j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
        return c;
    }

    if (n > 300) {
        double lg = 0.0;
        for (long long j = 1; j <= k; ++j)
            lg += q_integer_log(q, n - k + j) - q_integer_log(q, j);
        return std::exp(lg);
    }

    double r = 1.0;
    for (long long j = 1; j <= k; ++j) r *= q_integer(q, n - k + j) / q_integer(q, j);
    return r;
}

} // namespace lupasq
