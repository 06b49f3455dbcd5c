#include "lupasq/moduli.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lupasq {

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace kernels {

double max_window_diff_serial(const double* values, int count, int window) {
    double m = 0.0;
    for (int i = 0; i < count; ++i) {
        const int dmax = std::min(window, count - 1 - i);
        for (int d = 1; d <= dmax; ++d) {
            const double diff = std::fabs(values[i + d] - values[i]);
            if (diff > m) m = diff;
        }
    }
    return m;
}

double max_window_diff_parallel(const double* values, int count, int window) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (int i = 0; i < count; ++i) {
        const int dmax = std::min(window, count - 1 - i);
        for (int d = 1; d <= dmax; ++d) {
            const double diff = std::fabs(values[i + d] - values[i]);
            if (diff > m) m = diff;
        }
    }
    return m;
}

double max_second_diff_serial(const double* values, int count, int max_h_steps) {
    double m = 0.0;
    for (int j = 0; j < count; ++j) {
        const int hmax = std::min(max_h_steps, (count - 1 - j) / 2);
        for (int i = 1; i <= hmax; ++i) {
            const double diff =
                std::fabs(values[j + 2 * i] - 2.0 * values[j + i] + values[j]);
            if (diff > m) m = diff;
        }
    }
    return m;
}

double max_second_diff_parallel(const double* values, int count, int max_h_steps) {
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (int j = 0; j < count; ++j) {
        const int hmax = std::min(max_h_steps, (count - 1 - j) / 2);
        for (int i = 1; i <= hmax; ++i) {
            const double diff =
                std::fabs(values[j + 2 * i] - 2.0 * values[j + i] + values[j]);
            if (diff > m) m = diff;
        }
    }
    return m;
}

} // namespace kernels

namespace {

std::vector<double> sample(const TestFunction& f, int grid_points) {
    std::vector<double> values(static_cast<size_t>(grid_points));
    const double h = 1.0 / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) values[static_cast<size_t>(i)] = f(i * h);
    return values;
}

} // namespace

ModulusEstimate omega1(const TestFunction& f, double t, int grid_points, Exec exec) {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("omega1: t must lie in (0, 1]");
    if (grid_points < 2) throw std::domain_error("omega1: need at least 2 grid points");
    const auto values = sample(f, grid_points);
    const double h = 1.0 / (grid_points - 1);
    const int window = static_cast<int>(std::floor(t / h * (1.0 + 1e-12)));
    const double m = (exec == Exec::Parallel)
                         ? kernels::max_window_diff_parallel(values.data(), grid_points, window)
                         : kernels::max_window_diff_serial(values.data(), grid_points, window);
    return {ModulusKind::Omega1, t, m, grid_points, true};
}

ModulusEstimate omega2(const TestFunction& f, double t, int grid_points, Exec exec) {
    if (!(t > 0.0 && t <= 0.5)) throw std::domain_error("omega2: t must lie in (0, 1/2]");
    if (grid_points < 3) throw std::domain_error("omega2: need at least 3 grid points");
    const auto values = sample(f, grid_points);
    const double h = 1.0 / (grid_points - 1);
    const int steps = static_cast<int>(std::floor(t / h * (1.0 + 1e-12)));
    const double m = (exec == Exec::Parallel)
                         ? kernels::max_second_diff_parallel(values.data(), grid_points, steps)
                         : kernels::max_second_diff_serial(values.data(), grid_points, steps);
    return {ModulusKind::Omega2, t, m, grid_points, true};
}

} // namespace lupasq
