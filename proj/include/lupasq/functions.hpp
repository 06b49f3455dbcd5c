#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lupasq {

enum class SmoothnessClass { C0, C1, C2 };

using RealFn = std::function<double(double)>;

/// A named test function on [0,1]. Derivatives and the analytic moduli are
/// optional; a null std::function marks them absent. omega/omega2/d2_omega
/// are exact moduli of continuity (of f, f, f'' respectively) where known;
/// they let bound checks avoid the grid estimator's lower-bound bias.
struct TestFunction {
    std::string id;
    RealFn f;
    RealFn d1;
    RealFn d2;
    SmoothnessClass smoothness = SmoothnessClass::C2;
    bool convex = false;
    bool affine = false; // a t + b: both operators reproduce it exactly
    RealFn omega;
    RealFn omega2;
    RealFn d2_omega;

    double operator()(double x) const { return f(x); }
    bool has_d1() const { return static_cast<bool>(d1); }
    bool has_d2() const { return static_cast<bool>(d2); }
};

/// The built-in functions: const, linear, quad, cubic, quartic, exp,
/// sinpi, abshalf, abshalf3.
const std::vector<TestFunction>& registry();

/// Lookup by id; throws std::domain_error for unknown ids.
const TestFunction& find_function(const std::string& id);

/// a*t + b with exact moduli.
TestFunction make_linear(double a, double b);

/// g(x) = f(1-x); derivatives chain-ruled, smoothness/convexity and all
/// moduli carry over unchanged.
TestFunction reflect(const TestFunction& f);

} // namespace lupasq
