#pragma once

#include <optional>
#include <vector>

#include "lupasq/functions.hpp"
#include "lupasq/qcalc.hpp"

namespace lupasq {

/// One basis evaluation: weights and nodes at a fixed (q, x). For finite
/// degree the weights sum to 1 exactly (up to rounding); for the limit
/// operator the row is truncated and truncation_error_bound bounds the
/// dropped tail mass (the weights form a probability distribution).
struct BasisRow {
    bool is_limit = false;
    int degree = 0; // meaningful when !is_limit
    double q = 1.0;
    double x = 0.0;
    std::vector<double> weights;
    std::vector<double> nodes;
    double truncation_error_bound = 0.0;
};

/// v(t, x) = t*x / (1 - x + t*x), the node-shift map of the moment
/// recurrences. Monotone in x, maps [0,1] onto [0,1]. Satisfies
/// v(q^a, v(q^b, x)) = v(q^{a+b}, x).
double v_transform(double q_power, double x);

/// [k]_q / [n]_q, stable in both regimes (never forms huge q^k ratios).
double operator_node(const QParam& q, int n, int k);

/// Lupas basis b_{nk}(q; x) by the product form
///   C_q(n,k) * prod_{j<k} v(q^j,x) * prod_{j=k}^{n-1} (1 - v(q^j,x));
/// every factor lies in [0,1] apart from the binomial, which is folded in
/// as ratio factors, so no cancellation occurs anywhere.
BasisRow basis_lupas(const QParam& q, int n, double x);

/// Same row by the rational formula
///   C_q(n,k) q^{k(k-1)/2} x^k (1-x)^{n-k} / prod_{j=1}^{n-1} (1-x+q^j x).
/// Kept as an independent cross-check route for basis_lupas.
BasisRow basis_lupas_rational(const QParam& q, int n, double x);

/// Limit basis b_{inf,k}(q; x), 0 < q < 1, 0 <= x < 1; truncated at the
/// smallest K whose cumulative weight reaches 1 - tol (but at least
/// min_terms+1 weights are produced). Nodes are 1 - q^k.
BasisRow basis_limit(const QParam& q, double x, double tol, int min_terms = 0);

/// R_{n,q}(f, x) = sum f([k]/[n]) b_{nk}(q; x). Valid for every q > 0.
/// Interpolates f exactly at both end points.
double eval_lupas(const QParam& q, int n, const TestFunction& f, double x);

/// Limit operator: sum f(1-q^k) b_{inf,k}(q; x) for x < 1, f(1) at x = 1.
/// Truncation contributes at most ||f||_inf * tol.
double eval_limit(const QParam& q, const TestFunction& f, double x, double tol);

/// Phillips operator sum f([k]/[n]) C_q(n,k) x^k prod_{s<n-k} (1 - q^s x);
/// refuses q > 1 where the weights lose positivity.
double eval_phillips(const QParam& q, int n, const TestFunction& f, double x);

/// R_{n,q} (or R_{inf,q} when n is empty) for q > 1, computed by the
/// reduction to the sub-critical regime: evaluate at 1/q, reflect(f), 1-x.
double eval_supercritical(const QParam& q, std::optional<int> n, const TestFunction& f,
                          double x, double tol);

/// R_{n,q}(f,x) - R_{inf,q}(f,x) with the accuracy needed to scale by
/// [n]/q^n. A plain difference of the two evaluations loses all digits
/// once q^n drops under machine epsilon; when f carries derivatives this
/// switches to a decomposed sum whose terms are individually O(q^n):
///   sum [f(t_k)-f(s_k)] b_nk        (second-order Taylor at s_k)
/// + sum f(s_k) (b_nk - b_{inf,k})   (difference via expm1 of log-ratios)
/// - tail sum f(s_k) b_{inf,k}.
/// For q > 1 the reflection reduction is applied first. q = 1 is refused.
double operator_gap(const QParam& q, int n, const TestFunction& f, double x, double tol);

} // namespace lupasq
