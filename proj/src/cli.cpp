#include "fhdg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhdg/convergence.hpp"

namespace fhdg {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Stabilization parse_tau(const std::string& s)
{
    if (s == "single-face" || s == "single_face")
        return Stabilization::single_face(0);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || !(v >= 0.0))
        throw CLI::ValidationError("--tau", "expected a nonnegative number or 'single-face', got '" + s + "'");
    return Stabilization::constant(v);
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty())
            continue;
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size())
            throw std::invalid_argument("bad number '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

struct ConvergeArgs {
    std::string case_name = "sine1d";
    double alpha = -0.5;
    int degree = 1;
    int levels = 4;
    int coarse_n = 0; // 0: 8 in 1D, 4 in 2D
    double tfinal = 1.0;
    std::string tau = "1";
    std::string dt_rule = "proportional";
    int coarse_steps = 0;
    int max_steps = 0; // 0: 4096 in 1D, 1024 in 2D
    bool extrapolate = true;
    bool check = false;
    std::string out;
    std::string plot;
};

struct SolveArgs {
    std::string case_name = "sine1d";
    double alpha = -0.5;
    int degree = 1;
    int n = 8;
    int steps = 64;
    double tfinal = 1.0;
    std::string tau = "1";
    std::string out;
};

struct VerifyArgs {
    std::string alpha_grid = "-0.9,-0.5,-0.1";
    double tfinal = 1.0;
    int intervals = 2000;
    int ri_intervals = 10000;
};

struct ProjectArgs {
    int dim = 1;
    int degree = 1;
    int levels = 4;
    int coarse_n = 4;
    std::string tau = "both";
    bool check = false;
};

int converge(const ConvergeArgs& a, std::ostream& out)
{
    const ManufacturedCase mcase = make_case(a.case_name, a.alpha);
    ConvergenceOptions o;
    o.degree = a.degree;
    o.levels = a.levels;
    o.coarse_n = a.coarse_n > 0 ? a.coarse_n : (mcase.dim == 1 ? 8 : 4);
    o.final_time = a.tfinal;
    o.tau = parse_tau(a.tau);
    o.dt_rule = parse_dt_rule(a.dt_rule);
    o.coarse_steps = a.coarse_steps;
    o.max_steps = a.max_steps > 0 ? a.max_steps : (mcase.dim == 1 ? 4096 : 1024);
    o.time_extrapolation = a.extrapolate;

    const ConvergenceTable table = run_convergence(mcase, o);
    print_table(table, out);
    if (!a.out.empty())
        emit_csv(table, a.out);
    if (!a.plot.empty())
        emit_plotdata(table, a.plot);
    if (!a.check)
        return exit_ok;

    bool ok = true;
    const auto report = [&](const std::string& what, bool pass) {
        out << (pass ? "PASS " : "FAIL ") << what << '\n';
        ok = ok && pass;
    };
    const ConvergenceRow& last = table.rows.back();
    const double k = a.degree;
    if (table.rows.size() < 2) {
        report("at least two levels for a slope", false);
        return exit_failure;
    }
    for (const ConvergenceRow& r : table.rows)
        ok = ok && r.max_transmission <= 1e-10;
    report("transmission residual <= 1e-10 on every step", ok);
    if (!mcase.rates_asserted) {
        out << "rates are not asserted for the reduced-regularity profile\n";
        return ok ? exit_ok : exit_failure;
    }
    const double lo = k + 0.8;
    const double hi = mcase.dim == 1 ? k + 1.2 : 1e9;
    report("slope_u in range", *last.slope_u >= lo && *last.slope_u <= hi);
    report("slope_q in range", *last.slope_q >= lo && *last.slope_q <= hi);
    if (a.degree >= 1) {
        const double target = mcase.dim == 1 ? k + 2.0 - 0.3 : k + 1.6;
        report("slope_ustar >= " + std::to_string(target), *last.slope_ustar >= target);
        bool below = true;
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            below = below && table.rows[i].err_ustar < table.rows[i].err_u;
        report("err_ustar < err_u beyond the first level", below);
    }
    return ok ? exit_ok : exit_failure;
}

nlohmann::json vec(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

int solve(const SolveArgs& a, std::ostream& out)
{
    const ManufacturedCase mcase = make_case(a.case_name, a.alpha);
    const HdgSpace space(mcase.mesh(a.n), a.degree, parse_tau(a.tau));
    const TimeGrid grid(a.tfinal, a.steps);
    const MarchResult r = march(space, mcase.march_config(grid));
    const HDGState& x = r.states.back();
    const Postprocessor post(space);
    const PostState ustar = post.apply(x);
    const double T = a.tfinal;

    nlohmann::json j;
    j["case"] = mcase.name;
    j["alpha"] = mcase.alpha;
    j["degree"] = a.degree;
    j["tau"] = space.stabilization().describe();
    j["elements"] = space.mesh().num_elements();
    j["faces"] = space.mesh().num_faces();
    j["final_time"] = T;
    j["steps"] = a.steps;
    j["dt"] = grid.dt;
    j["max_transmission_residual"] = r.max_transmission;
    j["max_relative_residual"] = r.max_relative_residual;
    j["err_u"] = l2_error_u(space, x.u, [&](const Point& p) { return mcase.u(p, T); });
    j["err_q"] = l2_error_q(space, x.q, [&](const Point& p) { return mcase.q(p, T); });
    j["err_ustar"] = post.l2_error(ustar, [&](const Point& p) { return mcase.u(p, T); });
    j["linf_err_u"] = linfty_l2_error(space, r, [&](const Point& p, double t) { return mcase.u(p, t); });
    j["linf_err_q"] = linfty_l2_error_q(space, r, [&](const Point& p, double t) { return mcase.q(p, t); });
    j["counters"] = {{"factorizations", r.counters.factorizations},
                     {"back_substitutions", r.counters.back_substitutions},
                     {"convolution_terms", r.counters.convolution_terms}};
    j["state"] = {{"u", vec(x.u)}, {"q", vec(x.q)}, {"uhat", vec(x.uhat)}, {"ustar", vec(ustar.coeffs)}};

    if (a.out.empty()) {
        out << std::setw(2) << j << '\n';
    } else {
        std::ofstream f(a.out);
        if (!f)
            throw std::runtime_error("cannot open '" + a.out + "' for writing");
        f << std::setw(2) << j << '\n';
        out << "state written to " << a.out << '\n';
    }
    return exit_ok;
}

int verify_ops(const VerifyArgs& a, std::ostream& out)
{
    const std::vector<double> grid = parse_list(a.alpha_grid);
    if (grid.empty())
        throw CLI::ValidationError("--alpha-grid", "empty list");
    const auto basket = default_signal_basket();
    LemmaSuiteOptions opts;
    opts.intervals = a.intervals;

    bool ok = true;
    out << "basket of " << basket.size() << " signals, T = " << a.tfinal << '\n';
    out << std::setw(7) << "alpha" << std::setw(10) << "property" << std::setw(8) << "result" << std::setw(14)
        << "min slack" << '\n';
    for (const double alpha : grid) {
        const FractionalOrder order(alpha);
        const LemmaReport rep = verify_lemma_properties(order, a.tfinal, basket, opts);
        for (const std::string p : {"i", "ii", "iii", "iv", "v"}) {
            const bool pass = rep.property_pass(p);
            ok = ok && pass;
            out << std::setw(7) << alpha << std::setw(10) << p << std::setw(8) << (pass ? "pass" : "FAIL")
                << std::setw(14) << std::scientific << std::setprecision(3) << rep.min_slack(p) << '\n';
            out.unsetf(std::ios::floatfield);
        }
        if (alpha < 0.0) {
            const auto cubic = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t * t; };
            const RightInverseCheck c1 = right_inverse_residual(cubic, order, a.tfinal, a.ri_intervals);
            const RightInverseCheck c2 = right_inverse_residual(cubic, order, a.tfinal, 2 * a.ri_intervals);
            const bool pass = c1.max_residual <= 1e-4 && c2.max_residual <= 0.5 * c1.max_residual * 1.05;
            ok = ok && pass;
            out << std::setw(7) << alpha << std::setw(10) << "r-inverse" << std::setw(8) << (pass ? "pass" : "FAIL")
                << "  residual " << std::scientific << std::setprecision(3) << c1.max_residual << " (" << c1.intervals
                << "), " << c2.max_residual << " (" << c2.intervals << ")\n";
            out.unsetf(std::ios::floatfield);
        }
    }
    return ok ? exit_ok : exit_failure;
}

int project_test(const ProjectArgs& a, std::ostream& out)
{
    std::vector<std::pair<std::string, Stabilization>> modes;
    if (a.tau == "both") {
        modes = {{"constant(1)", Stabilization::constant(1.0)}, {"single-face", Stabilization::single_face(0)}};
    } else {
        const Stabilization t = parse_tau(a.tau);
        modes = {{t.describe(), t}};
    }
    bool ok = true;
    for (const auto& [name, tau] : modes) {
        const auto rows = projection_study(a.dim, a.degree, tau, a.levels, a.coarse_n);
        out << "tau " << name << ", k " << a.degree << ", d " << a.dim << '\n';
        out << std::setw(12) << "h" << std::setw(13) << "|PiW u - u|" << std::setw(7) << "rate" << std::setw(13)
            << "|PiV q - q|" << std::setw(7) << "rate" << std::setw(12) << "residual" << '\n';
        for (const ProjectionRow& r : rows) {
            const auto s = [](const std::optional<double>& v) {
                std::ostringstream os;
                if (v)
                    os << std::fixed << std::setprecision(2) << *v;
                else
                    os << "-";
                return os.str();
            };
            out << std::scientific << std::setprecision(3) << std::setw(12) << r.h << std::setw(13) << r.err_u
                << std::setw(7) << s(r.slope_u) << std::scientific << std::setw(13) << r.err_q << std::setw(7)
                << s(r.slope_q) << std::scientific << std::setw(12) << r.max_residual << '\n';
            out.unsetf(std::ios::floatfield);
        }
        const double target = a.degree + 0.9;
        const bool pass = *rows.back().slope_u >= target && *rows.back().slope_q >= target;
        if (a.check)
            out << (pass ? "PASS" : "FAIL") << " slopes >= " << target << '\n';
        ok = ok && pass;
    }
    return (!a.check || ok) ? exit_ok : exit_failure;
}

} // namespace

std::map<std::string, std::string> read_config(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fractional sub-diffusion HDG solver and verification harness", "fhdg"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::string config_path;
    app.add_option("--config", config_path, "Config file of `key = value` lines; flags override it");

    ConvergeArgs ca;
    CLI::App* cconv = app.add_subcommand("converge", "Convergence study on a manufactured solution");
    cconv->add_option("--case", ca.case_name, "sine1d, sine2d, reduced1d, reduced2d, exact1d, exact2d");
    cconv->add_option("--alpha", ca.alpha, "Fractional order in (-1, 0]");
    cconv->add_option("--degree", ca.degree, "Polynomial degree k (0..3)");
    cconv->add_option("--levels", ca.levels, "Number of mesh levels");
    cconv->add_option("--coarse-n", ca.coarse_n, "Elements per direction on the coarsest level");
    cconv->add_option("--tfinal", ca.tfinal, "Final time T");
    cconv->add_option("--tau", ca.tau, "Stabilization: a constant, or single-face");
    cconv->add_option("--dt-rule", ca.dt_rule, "proportional (dt ~ h^(k+1)) or fixed");
    cconv->add_option("--coarse-steps", ca.coarse_steps, "Time steps on the coarsest level (0: from --max-steps)");
    cconv->add_option("--max-steps", ca.max_steps, "Step budget of the finest level");
    cconv->add_flag("--extrapolate,!--no-extrapolate", ca.extrapolate,
                    "Richardson extrapolation in dt (two marches per level)");
    cconv->add_flag("--assert", ca.check, "Exit 1 unless the rate targets are met");
    cconv->add_option("--out", ca.out, "CSV output path");
    cconv->add_option("--plot", ca.plot, "Plot-data output path");

    SolveArgs sa;
    CLI::App* csolve = app.add_subcommand("solve", "Single run; dumps the final state as JSON");
    csolve->add_option("--case", sa.case_name, "Manufactured case");
    csolve->add_option("--alpha", sa.alpha, "Fractional order in (-1, 0]");
    csolve->add_option("--degree", sa.degree, "Polynomial degree k");
    csolve->add_option("--n", sa.n, "Elements per direction");
    csolve->add_option("--steps", sa.steps, "Time steps");
    csolve->add_option("--tfinal", sa.tfinal, "Final time T");
    csolve->add_option("--tau", sa.tau, "Stabilization: a constant, or single-face");
    csolve->add_option("--out", sa.out, "JSON output path (default: stdout)");

    VerifyArgs va;
    CLI::App* cver = app.add_subcommand("verify-ops", "Operator property suite and right-inverse identity");
    cver->add_option("--alpha-grid", va.alpha_grid, "Comma-separated orders");
    cver->add_option("--tfinal", va.tfinal, "Final time T");
    cver->add_option("--intervals", va.intervals, "Signal grid intervals for properties (i)-(iv)");
    cver->add_option("--ri-intervals", va.ri_intervals, "Grid intervals for the right-inverse check");

    ProjectArgs pa;
    CLI::App* cproj = app.add_subcommand("project-test", "Convergence of the coupled projection");
    cproj->add_option("--dim", pa.dim, "Space dimension (1 or 2)");
    cproj->add_option("--degree", pa.degree, "Polynomial degree k");
    cproj->add_option("--levels", pa.levels, "Number of mesh levels");
    cproj->add_option("--coarse-n", pa.coarse_n, "Elements per direction on the coarsest level");
    cproj->add_option("--tau", pa.tau, "both, a constant, or single-face");
    cproj->add_flag("--assert", pa.check, "Exit 1 unless slopes reach k + 0.9");

    if (args_in.empty()) {
        out << app.help();
        return exit_usage;
    }

    // Config values are placed right after the subcommand so that flags given
    // on the command line come later and win.
    std::vector<std::string> args = args_in;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t erase = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            erase = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            erase = 1;
        }
        if (erase == 0)
            continue;
        std::ifstream f(path);
        if (!f) {
            err << "cannot read config file '" << path << "'\n";
            return exit_usage;
        }
        std::map<std::string, std::string> cfg;
        try {
            cfg = read_config(f);
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return exit_usage;
        }
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i + erase));
        const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
            return s == "converge" || s == "solve" || s == "verify-ops" || s == "project-test";
        });
        if (sub == args.end()) {
            err << "--config needs a subcommand\n";
            return exit_usage;
        }
        std::vector<std::string> injected;
        for (const auto& [key, value] : cfg)
            injected.push_back("--" + key + "=" + value);
        args.insert(sub + 1, injected.begin(), injected.end());
        break;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (*cconv)
            return converge(ca, out);
        if (*csolve)
            return solve(sa, out);
        if (*cver)
            return verify_ops(va, out);
        if (*cproj)
            return project_test(pa, out);
    } catch (const CLI::ValidationError& e) {
        err << e.what() << '\n';
        return exit_usage;
    } catch (const std::logic_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    out << app.help();
    return exit_usage;
}

int run_cli(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace fhdg
