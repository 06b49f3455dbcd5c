#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lupasq/moments.hpp"
#include "lupasq/moduli.hpp"
#include "lupasq/operator_core.hpp"
#include "lupasq/parallel.hpp"
#include "lupasq/qcalc.hpp"
#include "lupasq/verify.hpp"

namespace {

using namespace lupasq;

// Exit-code contract: 0 success, 1 verification failure, 2 argument or
// configuration error, 3 domain error, 4 I/O error.
enum ExitCode { kOk = 0, kVerifyFail = 1, kArgError = 2, kDomainError = 3, kIoError = 4 };

struct IoFailure {
    std::string what;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Output {
    std::ofstream file;
    bool to_file = false;

    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw IoFailure{"cannot open output file: " + path};
            to_file = true;
        }
    }
    std::ostream& stream() { return to_file ? static_cast<std::ostream&>(file) : std::cout; }
    void finish() {
        if (to_file) {
            file.flush();
            if (!file) throw IoFailure{"write to output file failed"};
        }
    }
};

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int n = std::stoi(text);
            return {n, n};
        }
        const int a = std::stoi(text.substr(0, dots));
        const int b = std::stoi(text.substr(dots + 2));
        if (a < 1 || b < a) throw std::invalid_argument("bad range");
        return {a, b};
    } catch (const std::exception&) {
        throw std::invalid_argument("--n expects N or A..B with 1 <= A <= B, got '" + text + "'");
    }
}

std::string csv_field(std::string s) {
    for (auto& c : s)
        if (c == ',') c = ';';
    return s;
}

int cmd_eval(const std::string& op, double qv, std::optional<int> n, const std::string& fn,
             double x, double tol) {
    const TestFunction& f = find_function(fn);
    const QParam q(qv);
    double value = 0.0;
    if (op == "limit") {
        value = eval_limit(q, f, x, tol);
    } else {
        if (!n) throw std::invalid_argument("--n is required for op=" + op);
        if (op == "lupas") value = eval_lupas(q, *n, f, x);
        else if (op == "phillips") value = eval_phillips(q, *n, f, x);
        else value = eval_lupas(QParam(1.0), *n, f, x); // bernstein
    }
    std::cout << fmt17(value) << "\n";
    return kOk;
}

int cmd_table(double qv, const std::string& fn, std::pair<int, int> nrange, int grid,
              double tol, const std::string& out_path) {
    const TestFunction& f = find_function(fn);
    const QParam q(qv);
    if (qv == 1.0)
        throw std::domain_error("table: q = 1 has no limit operator to compare against");
    const bool sub = qv < 1.0;
    const auto xs = sub ? default_sub_grid(grid) : default_super_grid(grid);
    const double a = sub ? xs.back() : xs.front();
    const TestFunction g = reflect(f);

    std::vector<double> einf;
    if (!f.has_d2()) {
        einf.resize(xs.size());
        for (size_t i = 0; i < xs.size(); ++i)
            einf[i] = sub ? (xs[i] < 1.0 ? eval_limit(q, f, xs[i], tol) : f(1.0))
                          : eval_supercritical(q, std::nullopt, f, xs[i], tol);
    }

    Output out(out_path);
    out.stream() << "n,q,sup_error,bound_omega1,bound_omega2,ratio\n";
    for (int n = nrange.first; n <= nrange.second; ++n) {
        double sup = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            const double d = f.has_d2()
                                 ? operator_gap(q, n, f, xs[i], tol)
                                 : eval_lupas(q, n, f, xs[i]) - einf[i];
            sup = std::fmax(sup, std::fabs(d));
        }
        const double decay = sub ? detail::pow_int(qv, n) : detail::pow_int(1.0 / qv, n);
        const double b1 = sub ? 2.0 / ((1.0 - qv) * (1.0 - a)) * modulus_for_bound(f, decay)
                              : 2.0 * qv / (qv - 1.0) / a * modulus_for_bound(g, decay);
        const double b2 = sub ? modulus2_for_bound(f, std::sqrt(decay))
                              : modulus2_for_bound(g, std::sqrt(decay));
        const double ratio = (sup == 0.0) ? 0.0 : sup / b2;
        out.stream() << n << "," << fmt17(qv) << "," << fmt17(sup) << "," << fmt17(b1) << ","
                     << fmt17(b2) << "," << fmt17(ratio) << "\n";
    }
    out.finish();
    return kOk;
}

int cmd_verify(const std::string& suite, std::optional<double> qv, int grid, double tol,
               const std::string& out_path, bool inject) {
    VerifyOptions opt;
    opt.grid_points = grid;
    // inequality slacks are judged at 1e-13, so the internal limit-series
    // truncation has to sit well below that regardless of --tol
    opt.limit_tol = std::fmin(tol, 1e-15);
    if (qv) {
        if (*qv == 1.0)
            throw std::invalid_argument("--q 1 selects no regime; pass q < 1 or q > 1");
        const double qsub = *qv < 1.0 ? *qv : 1.0 / *qv;
        opt.q_sub = {qsub};
        opt.q_super = {1.0 / qsub};
    }
    bool any = false;
    for (const auto& id : all_check_ids()) any = any || suite_matches(suite, id);
    if (!any) throw std::invalid_argument("no checks match suite '" + suite + "'");

    if (inject) set_t2_closed_bitflip(true);
    const auto reports = run_checks(suite, opt);
    bool all_passed = true;
    for (const auto& r : reports) {
        std::cout << report_line(r) << "\n";
        all_passed = all_passed && r.passed;
    }
    if (!out_path.empty()) {
        Output out(out_path);
        out.stream() << "check_id,passed,worst_slack,grid,params,constants\n";
        for (const auto& r : reports) {
            std::string cs;
            for (const auto& [k, v] : r.constants) {
                if (!cs.empty()) cs += ";";
                cs += k + "=" + fmt17(v);
            }
            out.stream() << r.check_id << "," << (r.passed ? 1 : 0) << ","
                         << fmt17(r.worst_slack) << "," << csv_field(r.grid) << ","
                         << csv_field(r.params) << "," << cs << "\n";
        }
        out.finish();
    }
    return all_passed ? kOk : kVerifyFail;
}

int cmd_voronovskaja(const std::string& fn, std::optional<double> qv,
                     const std::string& schedule, std::pair<int, int> nrange,
                     std::optional<double> x_opt, int grid, double tol,
                     const std::string& out_path) {
    const TestFunction& f = find_function(fn);
    if (!f.has_d2())
        throw std::domain_error("voronovskaja: function '" + fn +
                                "' has no analytic second derivative");
    const std::vector<double> xs =
        x_opt ? std::vector<double>{*x_opt} : default_sub_grid(grid);

    Output out(out_path);
    out.stream() << "n,x,scaled_difference,target,residual,bound\n";
    for (int n = nrange.first; n <= nrange.second; ++n) {
        for (double x : xs) {
            double scaled, target, bound;
            if (!schedule.empty()) {
                const bool up = schedule[1] == '-'; // "1-..." vs "1+..."
                const bool quadratic = schedule.size() > 5; // "1-1/n^2"
                const double step = quadratic ? 1.0 / (static_cast<double>(n) * n)
                                              : 1.0 / static_cast<double>(n);
                const QParam qn(up ? 1.0 - step : 1.0 + step);
                const double scale =
                    up ? q_integer(qn, n) : q_integer(qn.reciprocal(), n);
                scaled = scale * (eval_lupas(qn, n, f, x) - f(x));
                target = 0.5 * f.d2(x) * x * (1.0 - x);
                const QParam qsub(up ? qn.value() : 1.0 / qn.value());
                const double vx = (x < 1.0) ? v_transform(qn.value(), x) : 1.0;
                const double geom = up ? x * (1.0 - (x < 1.0 ? v_transform(qn.value(), x) : 1.0))
                                       : vx * (1.0 - x);
                const double bn = q_integer(qsub, n);
                bound = geom * (f.d2_omega ? f.d2_omega(std::fmin(1.0, 1.0 / std::sqrt(bn)))
                                           : 0.0);
            } else {
                const QParam q(*qv);
                if (q.value() < 1.0) {
                    const double bn = q_integer(q, n);
                    const double qn = detail::pow_int(q.value(), n);
                    const double vx = (x < 1.0) ? v_transform(q.value(), x) : 1.0;
                    scaled = bn / qn * operator_gap(q, n, f, x, tol);
                    target = 0.5 * f.d2(x) * x * (1.0 - vx);
                    const auto rb = voronovskaja_residual(q, f, n, x);
                    bound = rb.second;
                } else {
                    const double scale =
                        detail::pow_int(q.value(), n) * q_integer(q.reciprocal(), n);
                    const double vx = (x < 1.0) ? v_transform(q.value(), x) : 1.0;
                    scaled = scale * operator_gap(q, n, f, x, tol);
                    target = 0.5 * f.d2(x) * vx * (1.0 - x);
                    const auto rb = voronovskaja_supercritical(q, f, n, x);
                    bound = rb.second;
                }
            }
            out.stream() << n << "," << fmt17(x) << "," << fmt17(scaled) << ","
                         << fmt17(target) << "," << fmt17(std::fabs(scaled - target)) << ","
                         << fmt17(bound) << "\n";
        }
    }
    out.finish();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lupas q-analogue of the Bernstein operators: evaluation, convergence "
                 "tables and a verification suite"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads for grid sweeps (results are identical at any count)");

    std::string op = "lupas", fn, suite = "all", nrange_text, schedule, out_path;
    double qv = 0.5, x = 0.5, tol = 1e-13;
    int grid = 65;
    std::optional<int> n_single;
    std::optional<double> q_opt, x_opt;
    bool inject = false;

    auto* eval = app.add_subcommand("eval", "evaluate one operator value");
    eval->add_option("--op", op, "lupas|limit|phillips|bernstein")
        ->check(CLI::IsMember({"lupas", "limit", "phillips", "bernstein"}));
    eval->add_option("--q", qv, "deformation parameter q > 0")->required();
    int eval_n = 0;
    auto* eval_n_opt = eval->add_option("--n", eval_n, "degree (not used by op=limit)");
    eval->add_option("--fn", fn, "registry function id")->required();
    eval->add_option("--x", x, "evaluation point in [0,1]")->required();
    eval->add_option("--tol", tol, "limit-series truncation tolerance");

    auto* table = app.add_subcommand("table", "CSV convergence table over an n-range");
    table->add_option("--q", qv, "q > 0, q != 1")->required();
    table->add_option("--fn", fn, "registry function id")->required();
    table->add_option("--n", nrange_text, "degree range A..B (or single N)")->required();
    table->add_option("--grid", grid, "x-grid resolution (default 65)");
    table->add_option("--tol", tol, "limit-series truncation tolerance");
    table->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--suite", suite, "check id, group prefix, or 'all'");
    verify->add_option("--q", q_opt, "restrict the q-sets to one value (and its mirror 1/q)");
    verify->add_option("--grid", grid, "x-grid resolution (default 65)");
    verify->add_option("--tol", tol, "limit-series truncation tolerance");
    verify->add_option("--out", out_path, "CSV mirror of the report");
    verify->add_flag("--inject-t2-bitflip", inject,
                     "fault-injection self-test: flip one bit of the t^2 closed form")
        ->group("");

    auto* voro = app.add_subcommand("voronovskaja", "CSV of scaled differences vs the "
                                                    "second-derivative target");
    voro->add_option("--fn", fn, "registry function id (needs d2)")->required();
    voro->add_option("--q", q_opt, "fixed q (q != 1)");
    voro->add_option("--schedule", schedule, "1-1/n, 1+1/n, 1-1/n^2 or 1+1/n^2")
        ->check(CLI::IsMember({"1-1/n", "1+1/n", "1-1/n^2", "1+1/n^2"}));
    voro->add_option("--n", nrange_text, "degree range A..B")->required();
    voro->add_option("--x", x_opt, "fixed evaluation point (default: x-grid sweep)");
    voro->add_option("--grid", grid, "x-grid resolution when --x is absent");
    voro->add_option("--tol", tol, "limit-series truncation tolerance");
    voro->add_option("--out", out_path, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kArgError;
    }

    lupasq::set_threads(threads);

    try {
        if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");
        if (grid < 3) throw std::invalid_argument("--grid must be at least 3");
        if (!verify->parsed()) {
            // --fn takes registry ids only; an unknown id is an argument
            // error, not a domain error of the computation
            try {
                find_function(fn);
            } catch (const std::domain_error& e) {
                throw std::invalid_argument(e.what());
            }
        }
        if (eval->parsed()) {
            if (!(qv > 0.0)) throw std::invalid_argument("--q must be positive");
            if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("--x must lie in [0,1]");
            if (eval_n_opt->count()) {
                if (eval_n < 1) throw std::invalid_argument("--n must be >= 1");
                n_single = eval_n;
            }
            return cmd_eval(op, qv, n_single, fn, x, tol);
        }
        if (table->parsed()) {
            if (!(qv > 0.0)) throw std::invalid_argument("--q must be positive");
            return cmd_table(qv, fn, parse_range(nrange_text), grid, tol, out_path);
        }
        if (verify->parsed()) {
            if (q_opt && !(*q_opt > 0.0)) throw std::invalid_argument("--q must be positive");
            return cmd_verify(suite, q_opt, grid, tol, out_path, inject);
        }
        if (q_opt && !schedule.empty())
            throw std::invalid_argument("give either --q or --schedule, not both");
        if (!q_opt && schedule.empty())
            throw std::invalid_argument("voronovskaja needs --q or --schedule");
        if (q_opt && (*q_opt <= 0.0 || *q_opt == 1.0))
            throw std::invalid_argument("--q must be positive and != 1");
        if (x_opt && !(*x_opt >= 0.0 && *x_opt <= 1.0))
            throw std::domain_error("--x must lie in [0,1]");
        return cmd_voronovskaja(fn, q_opt, schedule, parse_range(nrange_text), x_opt, grid,
                                tol, out_path);
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kArgError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::range_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    }
}
