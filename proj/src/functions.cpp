#include "lupasq/functions.hpp"

#include <cmath>
#include <stdexcept>

namespace lupasq {

namespace {

const double kPi = std::acos(-1.0);
const double kE = std::exp(1.0);

std::vector<TestFunction> build_registry() {
    std::vector<TestFunction> r;

    {
        TestFunction f;
        f.id = "const";
        f.f = [](double) { return 1.0; };
        f.d1 = [](double) { return 0.0; };
        f.d2 = [](double) { return 0.0; };
        f.convex = true;
        f.affine = true;
        f.omega = [](double) { return 0.0; };
        f.omega2 = [](double) { return 0.0; };
        f.d2_omega = [](double) { return 0.0; };
        r.push_back(f);
    }
    r.push_back(make_linear(1.0, 0.0));
    {
        TestFunction f;
        f.id = "quad";
        f.f = [](double t) { return t * t; };
        f.d1 = [](double t) { return 2.0 * t; };
        f.d2 = [](double) { return 2.0; };
        f.convex = true;
        f.omega = [](double t) { return t * (2.0 - t); };
        f.omega2 = [](double t) { return 2.0 * t * t; };
        f.d2_omega = [](double) { return 0.0; };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "cubic";
        f.f = [](double t) { return t * t * t; };
        f.d1 = [](double t) { return 3.0 * t * t; };
        f.d2 = [](double t) { return 6.0 * t; };
        f.omega = [](double t) { return t * (3.0 - 3.0 * t + t * t); };
        f.omega2 = [](double t) { return 6.0 * t * t * (1.0 - t); };
        f.d2_omega = [](double t) { return 6.0 * std::fmin(t, 1.0); };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "quartic";
        f.f = [](double t) { return t * t * t * t; };
        f.d1 = [](double t) { return 4.0 * t * t * t; };
        f.d2 = [](double t) { return 12.0 * t * t; };
        f.convex = true;
        f.omega = [](double t) { return t * (4.0 - t * (6.0 - t * (4.0 - t))); };
        // sup of the second difference 12x^2h^2 + 24xh^3 + 14h^4 at h=t, x=1-2t
        f.omega2 = [](double t) {
            double u = 1.0 - 2.0 * t;
            return 12.0 * u * u * t * t + 24.0 * u * t * t * t + 14.0 * t * t * t * t;
        };
        f.d2_omega = [](double t) { double s = std::fmin(t, 1.0); return 12.0 * s * (2.0 - s); };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "exp";
        f.f = [](double t) { return std::exp(t); };
        f.d1 = [](double t) { return std::exp(t); };
        f.d2 = [](double t) { return std::exp(t); };
        f.convex = true;
        f.omega = [](double t) { return kE * -std::expm1(-t); };
        f.omega2 = [](double t) { double g = std::expm1(t); return std::exp(1.0 - 2.0 * t) * g * g; };
        f.d2_omega = [](double t) { return kE * -std::expm1(-std::fmin(t, 1.0)); };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "sinpi";
        f.f = [](double t) { return std::sin(kPi * t); };
        f.d1 = [](double t) { return kPi * std::cos(kPi * t); };
        f.d2 = [](double t) { return -kPi * kPi * std::sin(kPi * t); };
        f.omega = [](double t) { return t <= 0.5 ? std::sin(kPi * t) : 1.0; };
        f.omega2 = [](double t) { double s = std::sin(0.5 * kPi * t); return 4.0 * s * s; };
        f.d2_omega = [](double t) { return kPi * kPi * (t <= 0.5 ? std::sin(kPi * t) : 1.0); };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "abshalf";
        f.f = [](double t) { return std::fabs(t - 0.5); };
        f.smoothness = SmoothnessClass::C0;
        f.omega = [](double t) { return std::fmin(t, 0.5); };
        f.omega2 = [](double t) { return 2.0 * std::fmin(t, 0.5); };
        r.push_back(f);
    }
    {
        TestFunction f;
        f.id = "abshalf3";
        f.f = [](double t) { double u = std::fabs(t - 0.5); return u * u * u; };
        f.d1 = [](double t) { double u = t - 0.5; return 3.0 * u * std::fabs(u); };
        f.smoothness = SmoothnessClass::C1;
        f.omega = [](double t) {
            if (t >= 0.5) return 0.125;
            return t * (0.75 - t * (1.5 - t));
        };
        r.push_back(f);
    }
    return r;
}

} // namespace

const std::vector<TestFunction>& registry() {
    static const std::vector<TestFunction> r = build_registry();
    return r;
}

const TestFunction& find_function(const std::string& id) {
    for (const auto& f : registry())
        if (f.id == id) return f;
    throw std::domain_error("unknown test function id: " + id);
}

TestFunction make_linear(double a, double b) {
    TestFunction f;
    f.id = "linear";
    f.f = [a, b](double t) { return a * t + b; };
    f.d1 = [a](double) { return a; };
    f.d2 = [](double) { return 0.0; };
    f.convex = true;
    f.affine = true;
    f.omega = [a](double t) { return std::fabs(a) * t; };
    f.omega2 = [](double) { return 0.0; };
    f.d2_omega = [](double) { return 0.0; };
    return f;
}

TestFunction reflect(const TestFunction& f) {
    TestFunction g;
    g.id = f.id + "_reflected";
    RealFn base = f.f;
    g.f = [base](double x) { return base(1.0 - x); };
    if (f.d1) {
        RealFn d1 = f.d1;
        g.d1 = [d1](double x) { return -d1(1.0 - x); };
    }
    if (f.d2) {
        RealFn d2 = f.d2;
        g.d2 = [d2](double x) { return d2(1.0 - x); };
    }
    g.smoothness = f.smoothness;
    g.convex = f.convex;
    g.affine = f.affine;
    g.omega = f.omega;
    g.omega2 = f.omega2;
    g.d2_omega = f.d2_omega;
    return g;
}

} // namespace lupasq
