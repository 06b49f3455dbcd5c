#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lupasq/functions.hpp"
#include "lupasq/moduli.hpp"
#include "lupasq/operator_core.hpp"
#include "lupasq/parallel.hpp"
#include "lupasq/qcalc.hpp"

namespace lupasq {

/// Outcome of one verified identity/inequality. For inequality checks
/// worst_slack is min(RHS - LHS) over the grid (passed iff >= -1e-13);
/// for identity checks it is max|LHS - RHS| (passed iff <= the check's
/// tolerance). Same inputs always produce bit-identical reports.
struct VerificationReport {
    std::string check_id;
    bool passed = false;
    double worst_slack = 0.0;
    std::string grid;
    std::string params;
    std::vector<std::pair<std::string, double>> constants;
};

struct VerifyOptions {
    std::vector<double> q_sub = {0.3, 0.5, 0.9};
    std::vector<double> q_super = {10.0 / 3.0, 2.0, 10.0 / 9.0};
    std::vector<int> degrees = {1, 2, 4, 8, 16, 32};
    int grid_points = 65;
    double limit_tol = 1e-15;
    Exec exec = Exec::Parallel;
};

std::vector<double> linspace(double a, double b, int count);

/// x-grids used throughout: [0, 63/64] below q = 1 (the bounds blow up at
/// x = 1) and the mirrored [1/64, 1] above.
std::vector<double> default_sub_grid(int points = 65);
std::vector<double> default_super_grid(int points = 65);

/// Analytic modulus when the function carries one, otherwise the grid
/// estimate inflated by 1.01: the estimator is a lower bound, and a lower
/// bound on the right-hand side of an inequality would make a pass vacuous.
double modulus_for_bound(const TestFunction& f, double t);
double modulus2_for_bound(const TestFunction& f, double t);

// ---- individual checks ------------------------------------------------

/// |b_nk - b_{inf,k}| <= b_nk x/(1-x) q^n/(1-q) + b_{inf,k} q^{n-k+1}/(1-q)
/// for all k <= n over the x-grid.
VerificationReport check_basis_difference_bound(const QParam& q, int n,
                                                std::span<const double> xs);

/// |R_n(f) - R_inf(f)| <= 2/((1-q)(1-x)) omega(f, q^n), 0 < q < 1.
VerificationReport check_rate_theorem(const QParam& q, const TestFunction& f,
                                      std::span<const int> ns, std::span<const double> xs,
                                      double tol);

/// The q > 1 companion: |R_n(f) - R_inf(f)| <= 2q/(q-1) (1/x) omega(g, q^{-n}).
VerificationReport check_rate_supercritical(const QParam& q, const TestFunction& f,
                                            std::span<const int> ns,
                                            std::span<const double> xs, double tol);

/// Sup-norm corollaries on [0,a] (q < 1) and [a,1] (q > 1).
VerificationReport check_uniform_interval_bounds(const QParam& q, const TestFunction& f,
                                                 double a, std::span<const int> ns,
                                                 double tol);

/// R_n(f) >= R_{n+1}(f) >= R_inf(f) pointwise for convex f.
VerificationReport check_convex_monotonicity(const QParam& q, const TestFunction& f,
                                             std::span<const int> ns,
                                             std::span<const double> xs, double tol);

/// Bounded-ratio scan of ||R_n(f) - R_inf(f)|| over n = 1..n_max against
/// the second modulus: omega2(f, sqrt(q^n)) for q < 1, and through the
/// reflection with omega2(g, n^{-1/2}) for q > 1. Bounded means the max
/// over the second half of the n-range stays within 1.5x the max over the
/// first half. Affine f is skipped (the ratio degenerates to 0/0). For
/// f = t^2 below q = 1 the ratio must also stay inside [0.01, 100]: the
/// decay rate q^n is genuinely two-sided there.
VerificationReport check_omega2_ratio(const TestFunction& f, std::span<const double> qs,
                                      int n_max, int grid_points, Exec exec);

/// (residual, bound) of the quantitative second-order asymptotic at one
/// point: residual = |[n]/q^n (R_n - R_inf)(f,x) - f''(x)/2 x(1-v(q,x))|,
/// bound = x(1-v(q,x)) omega(f'', [n]^{-1/2}). Requires analytic f''.
std::pair<double, double> voronovskaja_residual(const QParam& q, const TestFunction& f,
                                                int n, double x);

/// Mirror through the reflection reduction, q > 1:
/// residual = |q^n [n]_{1/q} (R_n - R_inf)(f,x) - f''(x)/2 v(q,x)(1-x)|,
/// bound = v(q,x)(1-x) omega(f'', [n]_{1/q}^{-1/2}).
std::pair<double, double> voronovskaja_supercritical(const QParam& q, const TestFunction& f,
                                                     int n, double x);

enum class QSchedule { OneMinusInvN, OnePlusInvN, OneMinusInvNSq, OnePlusInvNSq };

/// Scaled error of R_{n,q_n} against the second-derivative target
/// f''(x) x(1-x)/2 at n = 128 and n = 512; passes iff the sup-grid error
/// halves from 128 to 512 and stays under 0.05 (1 + ||f''||).
VerificationReport classical_limit_check(const TestFunction& f, QSchedule schedule,
                                         std::span<const double> xs);

/// [n](B_{n,q}(t^2,x) - x^2) = x(1-x) exactly for Phillips; the Lupas
/// analogue must visibly deviate (witness at q = 1/2, n = 4).
VerificationReport phillips_contrast_check(std::span<const double> qs,
                                           std::span<const int> ns,
                                           std::span<const double> xs);

// ---- suite ------------------------------------------------------------

/// All check ids, in the order run_checks emits them.
std::vector<std::string> all_check_ids();

/// filter: "all", a full id, or a prefix group ("moments", "rate", ...).
bool suite_matches(const std::string& filter, const std::string& id);

std::vector<VerificationReport> run_checks(const std::string& filter,
                                           const VerifyOptions& opt = {});

/// One-line rendering: "<id> PASS|FAIL worst_slack=<...> params=<...>".
std::string report_line(const VerificationReport& r);

} // namespace lupasq
