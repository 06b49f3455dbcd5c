// Serial vs OpenMP timings for the grid-sweep kernels. Also asserts the
// two paths give bit-identical results, since every reduction is a max.

#include <chrono>
#include <cstdio>
#include <vector>

#include "lupasq/moduli.hpp"
#include "lupasq/operator_core.hpp"
#include "lupasq/verify.hpp"

using namespace lupasq;
namespace chrono = std::chrono;

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
    fn(); // warm up
    const auto t0 = chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = chrono::steady_clock::now();
    return chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-32s %10.2f ms %10.2f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, equal ? "identical" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("%-32s %13s %13s %7s\n", "kernel", "serial", "parallel", "speedup");

    {
        const TestFunction& f = find_function("sinpi");
        double vs = 0.0, vp = 0.0;
        const double s = time_ms([&] { vs = omega1(f, 0.3, 8001, Exec::Serial).value; }, 3);
        const double p = time_ms([&] { vp = omega1(f, 0.3, 8001, Exec::Parallel).value; }, 3);
        row("omega1 sweep (8001 pts)", s, p, vs == vp);
    }
    {
        const TestFunction& f = find_function("exp");
        double vs = 0.0, vp = 0.0;
        const double s = time_ms([&] { vs = omega2(f, 0.25, 6001, Exec::Serial).value; }, 3);
        const double p = time_ms([&] { vp = omega2(f, 0.25, 6001, Exec::Parallel).value; }, 3);
        row("omega2 sweep (6001 pts)", s, p, vs == vp);
    }
    {
        VerifyOptions opt;
        opt.q_sub = {0.9};
        opt.q_super = {10.0 / 9.0};
        double vs = 0.0, vp = 0.0;
        const double s = time_ms(
            [&] {
                opt.exec = Exec::Serial;
                vs = run_checks("basis.partition_unity", opt)[0].worst_slack;
            },
            1);
        const double p = time_ms(
            [&] {
                opt.exec = Exec::Parallel;
                vp = run_checks("basis.partition_unity", opt)[0].worst_slack;
            },
            1);
        row("partition-of-unity scan", s, p, vs == vp);
    }
    {
        VerifyOptions opt;
        double vs = 0.0, vp = 0.0;
        const double s = time_ms(
            [&] {
                opt.exec = Exec::Serial;
                vs = run_checks("voronovskaja.exact_t2", opt)[0].worst_slack;
            },
            1);
        const double p = time_ms(
            [&] {
                opt.exec = Exec::Parallel;
                vp = run_checks("voronovskaja.exact_t2", opt)[0].worst_slack;
            },
            1);
        row("exact-t^2 identity scan", s, p, vs == vp);
    }
    return 0;
}
