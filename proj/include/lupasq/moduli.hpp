#pragma once

#include "lupasq/functions.hpp"
#include "lupasq/parallel.hpp"

namespace lupasq {

enum class ModulusKind { Omega1, Omega2 };

/// A grid estimate of a modulus. Always a lower bound of the true
/// supremum (the sup runs over grid pairs only), hence is_lower_bound.
struct ModulusEstimate {
    ModulusKind kind;
    double t;
    double value;
    int grid_points;
    bool is_lower_bound = true;
};

/// omega(f, t) = sup_{|x-y|<=t} |f(x)-f(y)| over a uniform grid.
ModulusEstimate omega1(const TestFunction& f, double t, int grid_points = 2001,
                       Exec exec = Exec::Parallel);

/// omega_2(f, t) = sup_{h<=t} sup_{x<=1-2h} |f(x+2h)-2f(x+h)+f(x)|,
/// h and x on the same uniform grid so second differences reuse samples.
ModulusEstimate omega2(const TestFunction& f, double t, int grid_points = 2001,
                       Exec exec = Exec::Parallel);

namespace kernels {

// The raw sweeps over a precomputed sample vector; exposed for the
// serial-vs-parallel benchmark and the equivalence tests.
double max_window_diff_serial(const double* values, int count, int window);
double max_window_diff_parallel(const double* values, int count, int window);
double max_second_diff_serial(const double* values, int count, int max_h_steps);
double max_second_diff_parallel(const double* values, int count, int max_h_steps);

} // namespace kernels

} // namespace lupasq
