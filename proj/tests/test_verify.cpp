#include "doctest.h"

#include <cmath>

#include "lupasq/moments.hpp"
#include "lupasq/verify.hpp"

using namespace lupasq;

namespace {

VerifyOptions fast_options() {
    VerifyOptions opt;
    opt.q_sub = {0.5};
    opt.q_super = {2.0};
    opt.degrees = {1, 2, 8};
    opt.grid_points = 17;
    return opt;
}

} // namespace

TEST_CASE("suite filters") {
    CHECK(suite_matches("all", "rate.est"));
    CHECK(suite_matches("rate", "rate.est"));
    CHECK(suite_matches("rate.est", "rate.est"));
    CHECK(!suite_matches("rate.e", "rate.est"));
    CHECK(!suite_matches("rat", "rate.est"));
    CHECK(!suite_matches("est", "rate.est"));
}

TEST_CASE("basis difference bound holds") {
    const auto xs = linspace(0.0, 0.95, 33);
    for (double q : {0.5, 0.9})
        for (int n : {8, 32}) {
            const auto r = check_basis_difference_bound(QParam(q), n, xs);
            CHECK(r.passed);
            CHECK(r.worst_slack >= -1e-13);
        }
}

TEST_CASE("rate bound: spot arithmetic at q=1/2, f=t^2, n=4, x=1/2") {
    // LHS = q^4/[4] x(1-v) = (0.0625/1.875)(1/3) = 1/90
    const QParam q(0.5);
    const TestFunction& f = find_function("quad");
    const double lhs = std::fabs(eval_lupas(q, 4, f, 0.5) - eval_limit(q, f, 0.5, 1e-14));
    CHECK(lhs == doctest::Approx(1.0 / 90.0).epsilon(1e-11));
    const double rhs = 2.0 / ((1.0 - 0.5) * (1.0 - 0.5)) * f.omega(std::pow(0.5, 4));
    CHECK(rhs == doctest::Approx(8.0 * 0.0625 * (2.0 - 0.0625)).epsilon(1e-13));
    CHECK(lhs < rhs);
}

TEST_CASE("rate checks pass on their grids") {
    const int ns[] = {1, 2, 4, 8, 16, 32};
    const auto sub = default_sub_grid(33);
    const auto sup = default_super_grid(33);
    for (const char* id : {"linear", "quad", "abshalf", "sinpi"}) {
        const TestFunction& f = find_function(id);
        CHECK(check_rate_theorem(QParam(0.9), f, ns, sub, 1e-13).passed);
        CHECK(check_rate_supercritical(QParam(1.1), f, ns, sup, 1e-13).passed);
        CHECK(check_uniform_interval_bounds(QParam(0.5), f, 0.8, ns, 1e-13).passed);
        CHECK(check_uniform_interval_bounds(QParam(2.0), f, 0.2, ns, 1e-13).passed);
    }
}

TEST_CASE("convex monotonicity") {
    const int ns[] = {1, 2, 4, 8};
    const auto sub = default_sub_grid(17);
    CHECK(check_convex_monotonicity(QParam(0.5), find_function("quad"), ns, sub, 1e-13).passed);
    CHECK(check_convex_monotonicity(QParam(0.9), find_function("exp"), ns, sub, 1e-13).passed);
    const auto lin = check_convex_monotonicity(QParam(0.5), find_function("linear"), ns, sub,
                                               1e-13);
    CHECK(lin.passed);
    CHECK(std::fabs(lin.worst_slack) <= 1e-13); // equalities all along the chain
}

TEST_CASE("voronovskaja residual spot values") {
    const QParam q(0.5);
    // f = t^2: the identity is exact, residual vanishes
    for (double x : {0.1, 0.5, 63.0 / 64.0}) {
        const auto [res, bound] = voronovskaja_residual(q, find_function("quad"), 6, x);
        CHECK(res <= 1e-12);
    }
    // end points: both sides vanish
    for (const char* id : {"cubic", "exp"}) {
        const auto [res0, b0] = voronovskaja_residual(q, find_function(id), 4, 0.0);
        CHECK(res0 <= 1e-13);
    }
    // f = t^3, n = 2, x = 1/2: residual = |6 * 11/135 - 1/2| = 1/90
    const auto [res, bound] = voronovskaja_residual(q, find_function("cubic"), 2, 0.5);
    CHECK(res == doctest::Approx(1.0 / 90.0).epsilon(1e-10));
    CHECK(bound > 0.0);
    CHECK_THROWS_AS(voronovskaja_residual(q, find_function("abshalf"), 2, 0.5),
                    std::domain_error);
    CHECK_THROWS_AS(voronovskaja_residual(QParam(2.0), find_function("cubic"), 2, 0.5),
                    std::domain_error);
}

TEST_CASE("supercritical voronovskaja: exact t^2 mirror identity") {
    for (double qv : {1.1, 2.0, 10.0 / 3.0}) {
        const QParam q(qv);
        for (double x : {1.0 / 64.0, 0.5, 1.0}) {
            const auto [res, bound] = voronovskaja_supercritical(q, find_function("quad"), 5, x);
            CHECK(res <= 1e-12);
        }
    }
    CHECK_THROWS_AS(voronovskaja_supercritical(QParam(0.5), find_function("quad"), 2, 0.5),
                    std::domain_error);
}

TEST_CASE("classical limit decays under the fast schedule") {
    const auto xs = default_sub_grid(17);
    const auto r = classical_limit_check(find_function("quad"), QSchedule::OneMinusInvNSq, xs);
    CHECK(r.passed);
    // and the 1-1/n schedule plateaus: scaled error tends to a positive
    // constant, so no halving between n = 128 and n = 512
    const auto p = classical_limit_check(find_function("quad"), QSchedule::OneMinusInvN, xs);
    CHECK(!p.passed);
    CHECK(p.constants[2].second > 0.9); // decay_ratio near 1
}

TEST_CASE("omega2 bounded-ratio scan") {
    const double qs_sub[] = {0.5};
    const double qs_super[] = {2.0};
    const auto quad_sub = check_omega2_ratio(find_function("quad"), qs_sub, 40, 17,
                                             Exec::Serial);
    CHECK(quad_sub.passed);
    REQUIRE(quad_sub.constants.size() == 2); // sharpness window tracked for t^2
    CHECK(quad_sub.constants[0].second >= 0.01);
    CHECK(quad_sub.constants[1].second <= 100.0);
    CHECK(check_omega2_ratio(find_function("cubic"), qs_super, 40, 17, Exec::Serial).passed);
    const auto lin = check_omega2_ratio(find_function("linear"), qs_sub, 40, 17, Exec::Serial);
    CHECK(lin.passed); // skipped by precondition
    CHECK(lin.params.find("skipped") != std::string::npos);
}

TEST_CASE("phillips contrast") {
    const double qs[] = {0.3, 0.5, 0.9, 1.0};
    const int ns[] = {1, 2, 4, 8, 16};
    const auto xs = default_sub_grid(33);
    const auto r = phillips_contrast_check(qs, ns, xs);
    CHECK(r.passed);
    CHECK(r.worst_slack <= 1e-12);
    REQUIRE(r.constants.size() == 1);
    CHECK(r.constants[0].second > 1e-6);
}

TEST_CASE("reports are deterministic") {
    const auto opt = fast_options();
    const auto a = run_checks("moments.sandwich", opt);
    const auto b = run_checks("moments.sandwich", opt);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].worst_slack == b[0].worst_slack);
    CHECK(a[0].passed == b[0].passed);
}

TEST_CASE("fault injection fails route agreement and nothing upstream") {
    const auto opt = fast_options();
    set_t2_closed_bitflip(true);
    const auto broken = run_checks("moments.route_agreement", opt);
    set_t2_closed_bitflip(false);
    const auto clean = run_checks("moments.route_agreement", opt);
    REQUIRE(broken.size() == 1);
    REQUIRE(clean.size() == 1);
    CHECK(!broken[0].passed);
    CHECK(clean[0].passed);
}

TEST_CASE("report line format") {
    VerificationReport r;
    r.check_id = "demo.check";
    r.passed = true;
    r.worst_slack = 0.5;
    r.params = "q=0.5";
    r.constants = {{"K", 2.0}};
    const auto line = report_line(r);
    CHECK(line.find("demo.check PASS worst_slack=0.5 params=q=0.5") == 0);
    CHECK(line.find("K=2") != std::string::npos);
}
