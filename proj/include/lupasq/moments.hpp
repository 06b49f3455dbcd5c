#pragma once

#include "lupasq/functions.hpp"
#include "lupasq/operator_core.hpp"
#include "lupasq/qcalc.hpp"

namespace lupasq {

enum class OperatorKind { Lupas, Limit, Phillips, Bernstein };
enum class MomentRoute { ClosedForm, Recurrence, BruteForce };

/// A moment value R(t^m, x) tagged with the route that produced it, so the
/// three routes can be cross-checked against each other.
struct MomentResult {
    OperatorKind op;
    int order;
    double q;
    int degree; // ignored for the limit operator
    double x;
    double value;
    MomentRoute route;
};

/// Closed forms for m <= 3 (both operators reproduce 1 and t; the second
/// and third moments follow the explicit formulas). m > 3 is a domain
/// error: use moment_recurrence.
MomentResult moment_closed(OperatorKind op, const QParam& q, int n, int m, double x);

/// Moments of any order by the downward recurrences
///   R_{n}(t^{m+1},x)   = R_{n}(t^m,x)   - (1-x) ([n-1]/[n])^m R_{n-1}(t^m, v(q,x))
///   R_{inf}(t^{m+1},x) = R_{inf}(t^m,x) - (1-x)              R_{inf}(t^m, v(q,x))
/// evaluated by dynamic programming over the shifted-point chain
/// x_j = v(q^j, x); the chain collapses because v(q,.) composes into
/// v(q^{j+1}, .). Grounds at order 0 (value 1) and at degree 1
/// (R_{1,q}(t^m, x) = x for m >= 1).
MomentResult moment_recurrence(OperatorKind op, const QParam& q, int n, int m, double x);

/// Independent oracle: the direct sum node^m * weight over the basis rows.
MomentResult moment_bruteforce(OperatorKind op, const QParam& q, int n, int m, double x,
                               double tol);

/// L_{n,q}(t^m, x) = R_{n,q}(t^m,x) - R_{inf,q}(t^m,x) for m in {2,3,4},
/// 0 < q < 1. m = 2 and m = 3 use the explicit factored formulas; m = 4
/// has no explicit closed form and is computed as the accurate numerical
/// difference (operator_gap).
double l_operator(int m, const QParam& q, int n, double x);

/// L applied to (t-x)^r, r in {2,3,4}: r = 2,3 by the explicit formulas,
/// r = 4 via L((t-x)^4) = L(t^4) - 4x L((t-x)^3) - 6x^2 L((t-x)^2)
/// (L annihilates constants and linear terms).
double central_moment_l(int r, const QParam& q, int n, double x);

/// L(t^{m+1}, x) by the coupled recurrence
///   L_n(t^{m+1},x) = L_n(t^m,x) + (1-x) [ (1 - ([n-1]/[n])^m) R_inf(t^m, v)
///                                         - ([n-1]/[n])^m L_{n-1}(t^m, v) ],
/// the route independent of the direct difference; used for consistency
/// checks.
double l_operator_recurrence(int m, const QParam& q, int n, double x);

/// q^n/[n] * x (1 - v(q,x)), the closed second-moment gap. Continuous up
/// to q = 1 (where it equals x(1-x)/n), which the q-sweep bounds need.
double l_t2_closed(double q, int n, double x);

/// Fault-injection hook for the self-test harness: when enabled, the
/// Lupas t^2 closed form returns its value with one mantissa bit flipped.
/// Leaves every other route untouched so route-agreement checks trip.
void set_t2_closed_bitflip(bool enabled);
bool t2_closed_bitflip_enabled();

} // namespace lupasq
