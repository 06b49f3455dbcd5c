#include "lupasq/moments.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lupasq {

namespace {

using detail::pow_int;

std::atomic<bool> g_t2_bitflip{false};

double bitflip(double value) {
    auto bits = std::bit_cast<std::uint64_t>(value);
    bits ^= (std::uint64_t{1} << 51); // top mantissa bit: a material, single-bit fault
    return std::bit_cast<double>(bits);
}

void require_sub_critical(const QParam& q, const char* who) {
    if (q.value() >= 1.0)
        throw std::domain_error(std::string(who) + ": requires 0 < q < 1");
}

// Shifted-point chain x_j = v(q^j, x), j = 0..m.
std::vector<double> point_chain(const QParam& q, int m, double x) {
    std::vector<double> xs(static_cast<size_t>(m) + 1);
    for (int j = 0; j <= m; ++j)
        xs[static_cast<size_t>(j)] = (j == 0) ? x : v_transform(pow_int(q.value(), j), x);
    return xs;
}

double ratio_power(const QParam& q, int deg, int m) {
    if (m == 0) return 1.0;
    return std::pow(q_integer(q, deg - 1) / q_integer(q, deg), m);
}

// R_{inf,q}(t^{m'}, x_j) for all m' <= m, j <= m - m'; q enters only
// through the precomputed chain xs.
std::vector<std::vector<double>> limit_moment_table(int m, const std::vector<double>& xs) {
    std::vector<std::vector<double>> t(static_cast<size_t>(m) + 1,
                                       std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
    for (int j = 0; j <= m; ++j) t[0][static_cast<size_t>(j)] = 1.0;
    for (int mp = 0; mp < m; ++mp)
        for (int j = 0; j + mp < m; ++j)
            t[static_cast<size_t>(mp + 1)][static_cast<size_t>(j)] =
                t[static_cast<size_t>(mp)][static_cast<size_t>(j)] -
                (1.0 - xs[static_cast<size_t>(j)]) *
                    t[static_cast<size_t>(mp)][static_cast<size_t>(j + 1)];
    return t;
}

// R_{n-j,q}(t^{m'}, x_j); cells below degree 1 are never read.
std::vector<std::vector<double>> lupas_moment_table(const QParam& q, int n, int m,
                                                    const std::vector<double>& xs) {
    std::vector<std::vector<double>> t(static_cast<size_t>(m) + 1,
                                       std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
    for (int j = 0; j <= m && n - j >= 1; ++j) t[0][static_cast<size_t>(j)] = 1.0;
    for (int mp = 0; mp < m; ++mp) {
        for (int j = 0; j + mp < m; ++j) {
            const int deg = n - j;
            if (deg < 1) continue;
            double val;
            if (deg == 1) {
                val = xs[static_cast<size_t>(j)]; // R_{1,q}(t^k, x) = x for k >= 1
            } else {
                val = t[static_cast<size_t>(mp)][static_cast<size_t>(j)] -
                      (1.0 - xs[static_cast<size_t>(j)]) * ratio_power(q, deg, mp) *
                          t[static_cast<size_t>(mp)][static_cast<size_t>(j + 1)];
            }
            t[static_cast<size_t>(mp + 1)][static_cast<size_t>(j)] = val;
        }
    }
    return t;
}

} // namespace

MomentResult moment_closed(OperatorKind op, const QParam& q, int n, int m, double x) {
    if (m < 0 || m > 3)
        throw std::domain_error("moment_closed: only m <= 3 has closed forms; use "
                                "moment_recurrence");
    if (op != OperatorKind::Lupas && op != OperatorKind::Limit)
        throw std::domain_error("moment_closed: closed forms cover the Lupas family only");
    if (op == OperatorKind::Limit) require_sub_critical(q, "moment_closed");

    const double qv = q.value();
    double value = 0.0;
    if (m == 0) {
        value = 1.0;
    } else if (m == 1) {
        value = x;
    } else {
        const double vx = (x < 1.0) ? v_transform(qv, x) : 1.0;
        const double omv = 1.0 - vx;
        const double v2 = (x < 1.0) ? v_transform(qv * qv, x) : 1.0;
        if (op == OperatorKind::Lupas) {
            const double bn = q_integer(q, n);
            if (m == 2) {
                value = x * vx + x * omv / bn;
                if (g_t2_bitflip.load(std::memory_order_relaxed)) value = bitflip(value);
            } else {
                const double bn1 = q_integer(q, n - 1);
                const double bn2 = (n >= 2) ? q_integer(q, n - 2) : 0.0;
                value = x * vx + x * omv / (bn * bn) -
                        bn1 * bn2 * qv * qv / (bn * bn) * x * omv * v2;
            }
        } else {
            if (m == 2)
                value = x * vx + (1.0 - qv) * x * omv;
            else
                value = x * vx + (1.0 - qv) * (1.0 - qv) * x * omv - qv * qv * x * omv * v2;
        }
    }
    return {op, m, qv, n, x, value, MomentRoute::ClosedForm};
}

MomentResult moment_recurrence(OperatorKind op, const QParam& q, int n, int m, double x) {
    if (m < 0) throw std::domain_error("moment_recurrence: m must be >= 0");
    if (op == OperatorKind::Lupas) {
        if (n < 1) throw std::domain_error("moment_recurrence: degree n must be >= 1");
        const auto xs = point_chain(q, m, x);
        const auto t = lupas_moment_table(q, n, m, xs);
        return {op, m, q.value(), n, x, t[static_cast<size_t>(m)][0], MomentRoute::Recurrence};
    }
    if (op == OperatorKind::Limit) {
        require_sub_critical(q, "moment_recurrence");
        const auto xs = point_chain(q, m, x);
        const auto t = limit_moment_table(m, xs);
        return {op, m, q.value(), n, x, t[static_cast<size_t>(m)][0], MomentRoute::Recurrence};
    }
    throw std::domain_error("moment_recurrence: recurrences cover the Lupas family only");
}

MomentResult moment_bruteforce(OperatorKind op, const QParam& q, int n, int m, double x,
                               double tol) {
    if (m < 0) throw std::domain_error("moment_bruteforce: m must be >= 0");
    auto power = [m](double t) {
        double r = 1.0;
        for (int i = 0; i < m; ++i) r *= t;
        return r;
    };
    BasisRow row;
    switch (op) {
    case OperatorKind::Limit:
        if (x == 1.0) return {op, m, q.value(), n, x, 1.0, MomentRoute::BruteForce};
        row = basis_limit(q, x, tol);
        break;
    case OperatorKind::Lupas:
        row = basis_lupas(q, n, x);
        break;
    case OperatorKind::Bernstein:
        row = basis_lupas(QParam(1.0), n, x);
        break;
    case OperatorKind::Phillips: {
        TestFunction f;
        f.f = [power](double t) { return power(t); };
        return {op, m, q.value(), n, x, eval_phillips(q, n, f, x), MomentRoute::BruteForce};
    }
    }
    double s = 0.0;
    for (size_t k = 0; k < row.weights.size(); ++k)
        if (row.weights[k] != 0.0) s += power(row.nodes[k]) * row.weights[k];
    return {op, m, q.value(), n, x, s, MomentRoute::BruteForce};
}

double l_operator(int m, const QParam& q, int n, double x) {
    require_sub_critical(q, "l_operator");
    if (n < 1) throw std::domain_error("l_operator: degree n must be >= 1");
    const double qv = q.value();
    const double qn = pow_int(qv, n);
    const double bn = q_integer(q, n);
    const double vx = (x < 1.0) ? v_transform(qv, x) : 1.0;
    const double omv = 1.0 - vx;
    switch (m) {
    case 2:
        return qn / bn * x * omv;
    case 3: {
        const double v2 = (x < 1.0) ? v_transform(qv * qv, x) : 1.0;
        const double bn1 = q_integer(q, n - 1);
        const double bracket = 2.0 - qn + bn1 * (1.0 + qv) * v2 + bn * qv * v2;
        return qn / (bn * bn) * x * omv * bracket;
    }
    case 4:
        return operator_gap(q, n, find_function("quartic"), x, 1e-15);
    default:
        throw std::domain_error("l_operator: m must be 2, 3 or 4");
    }
}

double central_moment_l(int r, const QParam& q, int n, double x) {
    require_sub_critical(q, "central_moment_l");
    if (n < 1) throw std::domain_error("central_moment_l: degree n must be >= 1");
    const double qv = q.value();
    switch (r) {
    case 2:
        return l_operator(2, q, n, x);
    case 3: {
        const double qn = pow_int(qv, n);
        const double bn = q_integer(q, n);
        const double vx = (x < 1.0) ? v_transform(qv, x) : 1.0;
        const double v2 = (x < 1.0) ? v_transform(qv * qv, x) : 1.0;
        const double bracket = 2.0 - qn + q_integer(q, n - 1) * (1.0 + qv) * v2 +
                               bn * qv * v2 - 3.0 * bn * x;
        return qn / (bn * bn) * x * (1.0 - vx) * bracket;
    }
    case 4:
        return l_operator(4, q, n, x) - 4.0 * x * central_moment_l(3, q, n, x) -
               6.0 * x * x * central_moment_l(2, q, n, x);
    default:
        throw std::domain_error("central_moment_l: r must be 2, 3 or 4");
    }
}

double l_operator_recurrence(int m, const QParam& q, int n, double x) {
    require_sub_critical(q, "l_operator_recurrence");
    if (n < 1) throw std::domain_error("l_operator_recurrence: degree n must be >= 1");
    if (m < 0) throw std::domain_error("l_operator_recurrence: m must be >= 0");
    const auto xs = point_chain(q, m, x);
    const auto rinf = limit_moment_table(m, xs);

    // TL[m'][j] = L_{n-j,q}(t^{m'}, x_j); at degree 1 the finite operator
    // collapses to x, so L grounds as x_j - R_inf(t^{m'}, x_j).
    std::vector<std::vector<double>> tl(static_cast<size_t>(m) + 1,
                                        std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
    for (int mp = 0; mp < m; ++mp) {
        for (int j = 0; j + mp < m; ++j) {
            const int deg = n - j;
            if (deg < 1) continue;
            double val;
            if (deg == 1) {
                val = xs[static_cast<size_t>(j)] -
                      rinf[static_cast<size_t>(mp + 1)][static_cast<size_t>(j)];
            } else {
                const double rp = ratio_power(q, deg, mp);
                val = tl[static_cast<size_t>(mp)][static_cast<size_t>(j)] +
                      (1.0 - xs[static_cast<size_t>(j)]) *
                          ((1.0 - rp) * rinf[static_cast<size_t>(mp)][static_cast<size_t>(j + 1)] -
                           rp * tl[static_cast<size_t>(mp)][static_cast<size_t>(j + 1)]);
            }
            tl[static_cast<size_t>(mp + 1)][static_cast<size_t>(j)] = val;
        }
    }
    return tl[static_cast<size_t>(m)][0];
}

double l_t2_closed(double q, int n, double x) {
    if (!(q > 0.0 && q <= 1.0))
        throw std::domain_error("l_t2_closed: q must lie in (0, 1]");
    if (n < 1) throw std::domain_error("l_t2_closed: degree n must be >= 1");
    const QParam qp(q);
    const double vx = (x < 1.0) ? v_transform(q, x) : 1.0;
    return pow_int(q, n) / q_integer(qp, n) * x * (1.0 - vx);
}

void set_t2_closed_bitflip(bool enabled) { g_t2_bitflip.store(enabled, std::memory_order_relaxed); }

bool t2_closed_bitflip_enabled() { return g_t2_bitflip.load(std::memory_order_relaxed); }

} // namespace lupasq
