#include "lupasq/operator_core.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace lupasq {

namespace {

using detail::ScaledProduct;
using detail::pow_int;

constexpr double kTailCutoff = 1e-17;   // drop limit-product factors below this relative size
constexpr int kSeriesCap = 200000;

void require_unit_interval(double x, const char* who) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error(std::string(who) + ": x must lie in [0,1]");
}

void require_degree(int n, const char* who) {
    if (n < 1) throw std::domain_error(std::string(who) + ": degree n must be >= 1");
}

// q^j together with v(q^j,x) and 1-v(q^j,x), both computed as clean
// quotients (no subtraction of near-equal quantities).
struct VFactors {
    double v;
    double one_minus_v;
};

VFactors v_factors(double q_power, double x) {
    if (q_power > 1e300) return {1.0, 0.0};
    const double den = (1.0 - x) + q_power * x;
    return {q_power * x / den, (1.0 - x) / den};
}

std::vector<double> node_vector(const QParam& q, int n) {
    std::vector<double> nodes(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) nodes[static_cast<size_t>(k)] = operator_node(q, n, k);
    return nodes;
}

} // namespace

double v_transform(double q_power, double x) {
    assert(q_power > 0.0);
    assert(x >= 0.0 && x <= 1.0);
    const double den = (1.0 - x) + q_power * x;
    assert(den > 0.0);
    return q_power * x / den;
}

double operator_node(const QParam& q, int n, int k) {
    require_degree(n, "operator_node");
    if (k < 0 || k > n) throw std::domain_error("operator_node: k must satisfy 0 <= k <= n");
    if (k == 0) return 0.0;
    if (k == n) return 1.0;
    const double qv = q.value();
    if (qv == 1.0) return static_cast<double>(k) / static_cast<double>(n);
    if (std::fabs(1.0 - qv) < 1e-8) return q_integer(q, k) / q_integer(q, n);
    if (qv < 1.0) return (1.0 - pow_int(qv, k)) / (1.0 - pow_int(qv, n));
    const double p = 1.0 / qv;
    return pow_int(p, n - k) * (1.0 - pow_int(p, k)) / (1.0 - pow_int(p, n));
}

BasisRow basis_lupas(const QParam& q, int n, double x) {
    require_degree(n, "basis_lupas");
    require_unit_interval(x, "basis_lupas");

    BasisRow row;
    row.degree = n;
    row.q = q.value();
    row.x = x;
    row.nodes = node_vector(q, n);
    row.weights.assign(static_cast<size_t>(n) + 1, 0.0);

    if (x == 0.0) { // end-point mass, bit-exact
        row.weights.front() = 1.0;
        return row;
    }
    if (x == 1.0) {
        row.weights.back() = 1.0;
        return row;
    }

    const double qv = q.value();
    std::vector<double> qi(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) qi[static_cast<size_t>(i)] = q_integer(q, i);

    std::vector<VFactors> vf(static_cast<size_t>(n));
    double qp = 1.0;
    for (int j = 0; j < n; ++j) {
        vf[static_cast<size_t>(j)] = v_factors(qp, x);
        qp *= qv;
    }

    // w_{k+1}/w_k = ([n-k]/[k+1]) * v_k/(1-v_k); the whole row is carried
    // in scaled form because end weights underflow double long before the
    // row stops mattering (q = 3, n = 64 reaches 1e-960).
    ScaledProduct w;
    for (int j = 0; j < n; ++j) w.multiply(vf[static_cast<size_t>(j)].one_minus_v);
    row.weights[0] = w.value();
    for (int k = 0; k < n; ++k) {
        w.multiply(qi[static_cast<size_t>(n - k)] / qi[static_cast<size_t>(k + 1)]);
        w.multiply(vf[static_cast<size_t>(k)].v / vf[static_cast<size_t>(k)].one_minus_v);
        row.weights[static_cast<size_t>(k + 1)] = w.value();
    }
    return row;
}

BasisRow basis_lupas_rational(const QParam& q, int n, double x) {
    require_degree(n, "basis_lupas_rational");
    require_unit_interval(x, "basis_lupas_rational");

    BasisRow row;
    row.degree = n;
    row.q = q.value();
    row.x = x;
    row.nodes = node_vector(q, n);
    row.weights.assign(static_cast<size_t>(n) + 1, 0.0);
    if (x == 0.0) {
        row.weights.front() = 1.0;
        return row;
    }
    if (x == 1.0) {
        row.weights.back() = 1.0;
        return row;
    }

    const double qv = q.value();
    std::vector<double> qi(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) qi[static_cast<size_t>(i)] = q_integer(q, i);

    ScaledProduct denom; // (1-x+qx)(1-x+q^2 x)...(1-x+q^{n-1} x)
    double qp = qv;
    for (int j = 1; j < n; ++j) {
        denom.multiply((1.0 - x) + qp * x);
        qp *= qv;
    }

    ScaledProduct acc; // C_q(n,k) q^{k(k-1)/2} x^k (1-x)^{n-k}
    for (int j = 0; j < n; ++j) acc.multiply(1.0 - x);
    qp = 1.0;
    for (int k = 0; k <= n; ++k) {
        ScaledProduct wk = acc;
        wk.mantissa /= denom.mantissa;
        wk.exponent -= denom.exponent;
        row.weights[static_cast<size_t>(k)] = wk.value();
        if (k == n) break;
        acc.multiply(qi[static_cast<size_t>(n - k)] / qi[static_cast<size_t>(k + 1)]);
        acc.multiply(qp * x);
        acc.divide(1.0 - x);
        qp *= qv;
    }
    return row;
}

BasisRow basis_limit(const QParam& q, double x, double tol, int min_terms) {
    if (q.value() >= 1.0)
        throw std::domain_error("basis_limit: the limit operator series requires q < 1");
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("basis_limit: x must lie in [0,1)");
    if (!(tol > 0.0)) throw std::domain_error("basis_limit: tol must be positive");

    BasisRow row;
    row.is_limit = true;
    row.q = q.value();
    row.x = x;

    if (x == 0.0) { // v(q^j, 0) = 0 for every j: all mass at the first node
        double qk = 1.0;
        for (int k = 0; k <= min_terms; ++k) {
            row.weights.push_back(k == 0 ? 1.0 : 0.0);
            row.nodes.push_back(1.0 - qk);
            qk *= q.value();
        }
        return row;
    }

    const double qv = q.value();
    const double r = x / (1.0 - x);

    ScaledProduct w; // b_{inf,0} = prod_{j>=0} (1 - v(q^j,x)), truncated where
    double t = 1.0;  // the factor differs from 1 by less than kTailCutoff
    int guard = 0;
    while (t * r >= kTailCutoff) {
        w.multiply(v_factors(t, x).one_minus_v);
        t *= qv;
        if (++guard > kSeriesCap)
            throw std::range_error("basis_limit: infinite product did not converge");
    }

    double cum = 0.0;
    double qk = 1.0;       // q^k
    double qk1 = qv;       // q^{k+1}
    for (int k = 0;; ++k) {
        const double wk = w.value();
        row.weights.push_back(wk);
        row.nodes.push_back(1.0 - qk);
        cum += wk;
        if (cum >= 1.0 - tol && k >= min_terms) break;
        if (wk < 1e-18 * cum && k >= min_terms) break; // fp plateau: further terms cannot move cum
        if (k > kSeriesCap)
            throw std::range_error("basis_limit: weight series did not reach 1 - tol");
        w.multiply(qk * r / (1.0 - qk1));
        qk = qk1;
        qk1 *= qv;
    }
    row.truncation_error_bound = std::fmax(0.0, 1.0 - cum);
    return row;
}

double eval_lupas(const QParam& q, int n, const TestFunction& f, double x) {
    require_degree(n, "eval_lupas");
    require_unit_interval(x, "eval_lupas");
    if (x == 0.0) return f(0.0);
    if (x == 1.0) return f(1.0);
    const BasisRow row = basis_lupas(q, n, x);
    double s = 0.0;
    for (size_t k = 0; k < row.weights.size(); ++k)
        if (row.weights[k] != 0.0) s += f(row.nodes[k]) * row.weights[k];
    return s;
}

double eval_limit(const QParam& q, const TestFunction& f, double x, double tol) {
    if (q.value() >= 1.0)
        throw std::domain_error("eval_limit: the limit operator requires q < 1");
    require_unit_interval(x, "eval_limit");
    if (x == 1.0) return f(1.0); // piecewise definition
    const BasisRow row = basis_limit(q, x, tol);
    double s = 0.0;
    for (size_t k = 0; k < row.weights.size(); ++k)
        if (row.weights[k] != 0.0) s += f(row.nodes[k]) * row.weights[k];
    return s;
}

double eval_phillips(const QParam& q, int n, const TestFunction& f, double x) {
    if (q.value() > 1.0)
        throw std::domain_error("eval_phillips: weights lose positivity for q > 1");
    require_degree(n, "eval_phillips");
    require_unit_interval(x, "eval_phillips");
    if (x == 0.0) return f(0.0);
    if (x == 1.0) return f(1.0);

    const double qv = q.value();
    std::vector<double> qi(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) qi[static_cast<size_t>(i)] = q_integer(q, i);
    std::vector<double> qpow(static_cast<size_t>(n));
    double qp = 1.0;
    for (int s = 0; s < n; ++s) {
        qpow[static_cast<size_t>(s)] = qp;
        qp *= qv;
    }

    const std::vector<double> nodes = node_vector(q, n);
    ScaledProduct w;
    for (int s = 0; s < n; ++s) w.multiply(1.0 - qpow[static_cast<size_t>(s)] * x);
    double sum = f(nodes[0]) * w.value();
    for (int k = 0; k < n; ++k) {
        w.multiply(qi[static_cast<size_t>(n - k)] / qi[static_cast<size_t>(k + 1)]);
        w.multiply(x / (1.0 - qpow[static_cast<size_t>(n - k - 1)] * x));
        const double wk = w.value();
        if (wk != 0.0) sum += f(nodes[static_cast<size_t>(k + 1)]) * wk;
    }
    return sum;
}

double eval_supercritical(const QParam& q, std::optional<int> n, const TestFunction& f,
                          double x, double tol) {
    if (q.value() <= 1.0)
        throw std::domain_error("eval_supercritical: requires q > 1");
    require_unit_interval(x, "eval_supercritical");
    const TestFunction g = reflect(f);
    const QParam p = q.reciprocal();
    if (n) return eval_lupas(p, *n, g, 1.0 - x);
    return eval_limit(p, g, 1.0 - x, tol);
}

namespace {

double sampled_magnitude(const TestFunction& f, double x) {
    double m = 0.0;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0, x}) m = std::fmax(m, std::fabs(f(t)));
    return m;
}

double d2_modulus_estimate(const TestFunction& f, double delta) {
    if (f.d2_omega) return f.d2_omega(std::fmin(delta, 1.0));
    double sup = 0.0;
    for (int i = 0; i <= 32; ++i) sup = std::fmax(sup, std::fabs(f.d2(i / 32.0)));
    return 2.0 * sup;
}

// Neumaier-compensated accumulator: the log-ratio sums mix magnitudes and
// their rounding would otherwise dominate the q^n-scale result.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

double gap_decomposed(const QParam& q, int n, const TestFunction& f, double x) {
    const double qv = q.value();
    const double qn = pow_int(qv, n);
    const double r = x / (1.0 - x);

    // The dropped product tail perturbs every b_{inf,k} by ~ q^J r, and the
    // gap itself is only O(q^n); the cutoff has to shrink with q^n, not sit
    // at a fixed absolute level.
    const double tail_cut = std::fmax(kTailCutoff * qn, 1e-300);
    std::vector<double> qpow; // q^j until the product factors stop mattering
    double t = 1.0;
    while (t * r >= tail_cut || static_cast<int>(qpow.size()) <= n) {
        qpow.push_back(t);
        t *= qv;
        if (qpow.size() > static_cast<size_t>(kSeriesCap))
            throw std::range_error("operator_gap: tail did not converge");
    }
    const int jmax = static_cast<int>(qpow.size()); // factors beyond jmax are 1 to within cutoff

    const BasisRow row = basis_lupas(q, n, x);
    const double one_minus_qn = 1.0 - qn;

    // I1: sum b_nk [f(t_k) - f(s_k)], t_k - s_k = q^n (1-q^k)/(1-q^n),
    // expanded to second order around s_k.
    CompensatedSum i1acc;
    for (int k = 0; k <= n; ++k) {
        const double w = row.weights[static_cast<size_t>(k)];
        if (w == 0.0) continue;
        const double sk = 1.0 - qpow[static_cast<size_t>(k)];
        const double delta = qn * (1.0 - qpow[static_cast<size_t>(k)]) / one_minus_qn;
        i1acc.add(w * (f.d1(sk) * delta + 0.5 * f.d2(sk) * delta * delta));
    }
    const double i1 = i1acc.value();

    // I2: sum f(s_k) (b_nk - b_{inf,k}); the ratio b_{inf,k}/b_nk equals
    // prod_{j>=n} (1-v(q^j,x)) / prod_{i=n-k+1}^{n} (1-q^i), so the
    // difference is -b_nk * expm1(log-ratio), exact at any magnitude.
    CompensatedSum aacc;
    for (int j = n; j < jmax; ++j)
        aacc.add(std::log1p(-v_factors(qpow[static_cast<size_t>(j)], x).v));
    const double a = aacc.value();
    CompensatedSum i2acc;
    CompensatedSum bkacc; // running sum of log(1-q^i), i = n-k+1..n
    double s_n = a;       // log-ratio at k = n, kept for the tail start
    for (int k = 0; k <= n; ++k) {
        if (k > 0) bkacc.add(std::log1p(-pow_int(qv, n - k + 1)));
        const double sk_log = a - bkacc.value();
        if (k == n) s_n = sk_log;
        const double w = row.weights[static_cast<size_t>(k)];
        if (w == 0.0) continue;
        i2acc.add(f(1.0 - qpow[static_cast<size_t>(k)]) * w * (-std::expm1(sk_log)));
    }
    const double i2 = i2acc.value();

    // I3: tail sum_{k>n} f(s_k) b_{inf,k}, grown from b_{inf,n} by the
    // limit-basis ratio. The tail can rise for a long stretch before it
    // decays (its mass peaks near 1 - q^k = x), so only a shrinking term
    // may end the loop.
    double i3 = 0.0;
    const double bnn = row.weights.back();
    if (bnn > 0.0) {
        double w = bnn * std::exp(s_n);
        double qk = pow_int(qv, n);
        double qk1 = qk * qv;
        for (int k = n; k - n < kSeriesCap; ++k) {
            const double ratio = qk * r / (1.0 - qk1);
            w *= ratio;
            qk = qk1;
            qk1 *= qv;
            const double sk = 1.0 - qk; // node of index k+1
            i3 += f(sk) * w;
            if (ratio < 1.0 &&
                w < 1e-19 * (std::fabs(i1) + std::fabs(i2) + std::fabs(i3)) + 1e-305)
                break;
        }
    }
    return i1 + i2 - i3;
}

} // namespace

double operator_gap(const QParam& q, int n, const TestFunction& f, double x, double tol) {
    require_degree(n, "operator_gap");
    require_unit_interval(x, "operator_gap");
    if (q.value() == 1.0)
        throw std::domain_error("operator_gap: q = 1 has no limit operator");
    if (q.value() > 1.0) return operator_gap(q.reciprocal(), n, reflect(f), 1.0 - x, tol);
    if (x == 0.0 || x == 1.0) return 0.0; // both operators interpolate there
    if (f.affine) return 0.0;             // both reproduce a t + b exactly

    const double qn = pow_int(q.value(), n);
    const double fmag = sampled_magnitude(f, x);
    const double err_naive = 8e-16 * (1.0 + fmag);
    double err_taylor = HUGE_VAL;
    if (f.has_d1() && f.has_d2()) {
        // The decomposed pieces are O(q^n (1+r)/(1-q)) until that saturates
        // at O(||f||); past saturation they cancel like the naive route.
        const double piece = std::fmin(
            1.0, qn * (1.0 + x / (1.0 - x)) / (1.0 - q.value()));
        err_taylor = 0.5 * qn * qn * d2_modulus_estimate(f, qn) +
                     4e-15 * piece * (1.0 + fmag) + 1e-15 * qn;
    }

    if (err_taylor < err_naive) return gap_decomposed(q, n, f, x);
    return eval_lupas(q, n, f, x) - eval_limit(q, f, x, tol);
}

} // namespace lupasq
