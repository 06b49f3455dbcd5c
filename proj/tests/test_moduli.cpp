#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lupasq/moduli.hpp"

using namespace lupasq;

TEST_CASE("omega1 basics") {
    CHECK(omega1(find_function("linear"), 0.25, 2001).value ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(omega1(find_function("const"), 0.4, 501).value == 0.0);
    // analytic omega(t^2, t) = t(2-t) = 0.75 at t = 1/2
    CHECK(omega1(find_function("quad"), 0.5, 2001).value ==
          doctest::Approx(0.75).epsilon(2e-3));
    CHECK_THROWS_AS(omega1(find_function("quad"), 0.0, 100), std::domain_error);
    CHECK_THROWS_AS(omega1(find_function("quad"), 1.5, 100), std::domain_error);
}

TEST_CASE("omega2 basics") {
    CHECK(omega2(make_linear(3.0, -1.0), 0.25, 801).value <= 1e-12);
    // second difference of t^2 is 2h^2, sup = 2t^2 = 0.5 at t = 1/2
    CHECK(omega2(find_function("quad"), 0.5, 2001).value ==
          doctest::Approx(0.5).epsilon(2e-3));
    // brute maximum of 6h^2(x+h) under h<=1/4, x<=1-2h: at h=1/4, x=1/2: 0.28125
    CHECK(omega2(find_function("cubic"), 0.25, 2001).value ==
          doctest::Approx(0.28125).epsilon(2e-3));
    CHECK_THROWS_AS(omega2(find_function("quad"), 0.75, 100), std::domain_error);
}

TEST_CASE("estimates never exceed the analytic modulus") {
    for (const auto& f : registry()) {
        for (double t : {0.05, 0.21, 0.5}) {
            if (f.omega) {
                const double est = omega1(f, t, 2001).value;
                CHECK(est <= f.omega(t) + 1e-12);
                CHECK(f.omega(t) - est <= 5e-3);
            }
            if (f.omega2 && t <= 0.5) {
                const double est = omega2(f, t, 2001).value;
                CHECK(est <= f.omega2(t) + 1e-12);
                CHECK(f.omega2(t) - est <= 5e-3);
            }
        }
    }
}

TEST_CASE("monotone in t on a fixed grid") {
    for (const char* id : {"quad", "sinpi", "abshalf"}) {
        const TestFunction& f = find_function(id);
        double prev1 = 0.0, prev2 = 0.0;
        for (double t : {0.05, 0.1, 0.2, 0.35, 0.5}) {
            const double e1 = omega1(f, t, 801).value;
            const double e2 = omega2(f, t, 801).value;
            CHECK(e1 >= prev1);
            CHECK(e2 >= prev2);
            prev1 = e1;
            prev2 = e2;
        }
    }
}

TEST_CASE("subadditivity proxy omega(lambda t) <= (1+lambda) omega(t)") {
    for (const auto& f : registry()) {
        for (double t : {0.04, 0.11})
            for (double lam : {1.5, 2.0, 3.7}) {
                if (t * lam > 1.0) continue;
                if (f.omega) {
                    CHECK(f.omega(lam * t) <= (1.0 + lam) * f.omega(t) + 1e-12);
                }
                const double a = omega1(f, lam * t, 1001).value;
                const double b = omega1(f, t, 1001).value;
                CHECK(a <= (1.0 + lam) * b * (1.0 + 5e-3) + 1e-12);
            }
    }
}

TEST_CASE("omega2 stays under the coarse 4||f|| bound") {
    for (const auto& f : registry()) {
        double norm = 0.0;
        for (int i = 0; i <= 200; ++i) norm = std::fmax(norm, std::fabs(f(i / 200.0)));
        CHECK(omega2(f, 0.5, 801).value <= 4.0 * norm + 1e-12);
    }
}

TEST_CASE("serial and parallel sweeps agree bitwise") {
    for (const char* id : {"quad", "exp", "sinpi", "abshalf3"}) {
        const TestFunction& f = find_function(id);
        for (double t : {0.07, 0.3}) {
            CHECK(omega1(f, t, 3001, Exec::Serial).value ==
                  omega1(f, t, 3001, Exec::Parallel).value);
            CHECK(omega2(f, t, 3001, Exec::Serial).value ==
                  omega2(f, t, 3001, Exec::Parallel).value);
        }
    }
}

TEST_CASE("refining the grid moves the estimate by less than 1e-3") {
    for (const auto& f : registry()) {
        const double a = omega1(f, 0.3, 2001).value;
        const double b = omega1(f, 0.3, 4001).value;
        CHECK(std::fabs(b - a) < 1e-3);
        CHECK(b >= a - 1e-12); // nested grids only add pairs
    }
}
