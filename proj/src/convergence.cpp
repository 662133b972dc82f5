#include "fhdg/convergence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fhdg {

DtRule parse_dt_rule(const std::string& s)
{
    if (s == "proportional" || s == "h^(k+1)" || s == "hk1")
        return DtRule::proportional;
    if (s == "fixed")
        return DtRule::fixed;
    throw std::invalid_argument("unknown dt rule '" + s + "' (proportional, fixed)");
}

std::string to_string(DtRule rule)
{
    return rule == DtRule::proportional ? "proportional" : "fixed";
}

void ConvergenceTable::compute_slopes()
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ConvergenceRow& r = rows[i];
        if (i == 0) {
            r.slope_u.reset();
            r.slope_q.reset();
            r.slope_ustar.reset();
            continue;
        }
        const ConvergenceRow& c = rows[i - 1];
        const double lh = std::log(c.h / r.h);
        r.slope_u = std::log(c.err_u / r.err_u) / lh;
        r.slope_q = std::log(c.err_q / r.err_q) / lh;
        r.slope_ustar = std::log(c.err_ustar / r.err_ustar) / lh;
    }
}

int steps_for_level(const ConvergenceOptions& o, int level)
{
    const int per_level = o.dt_rule == DtRule::proportional ? o.degree + 1 : 0;
    int coarse = o.coarse_steps;
    if (coarse <= 0) {
        const int budget = o.time_extrapolation ? o.max_steps / 2 : o.max_steps;
        coarse = std::max(1, budget >> (per_level * (o.levels - 1)));
    }
    return coarse << (per_level * level);
}

namespace {

struct LevelResult {
    HDGState final_state;
    double err_u_max = 0.0;
    double err_q_max = 0.0;
    double max_transmission = 0.0;
    double max_relative_residual = 0.0;
};

LevelResult run_level(const ManufacturedCase& mcase, const HdgSpace& space, const ConvergenceOptions& o, int steps)
{
    const auto exact_u = [&](double t) { return [&mcase, t](const Point& x) { return mcase.u(x, t); }; };
    const auto exact_q = [&](double t) { return [&mcase, t](const Point& x) { return mcase.q(x, t); }; };

    const TimeGrid grid(o.final_time, steps);
    MarchResult coarse = march(space, mcase.march_config(grid));
    LevelResult out;
    out.max_transmission = coarse.max_transmission;
    out.max_relative_residual = coarse.max_relative_residual;

    if (!o.time_extrapolation) {
        for (int n = 0; n <= steps; ++n) {
            const double t = grid.node(n);
            out.err_u_max = std::max(out.err_u_max, l2_error_u(space, coarse.states[n].u, exact_u(t)));
            out.err_q_max = std::max(out.err_q_max, l2_error_q(space, coarse.states[n].q, exact_q(t)));
        }
        out.final_state = std::move(coarse.states.back());
        return out;
    }

    // Richardson extrapolation in dt: 2 x_{2N} - x_N at the common nodes
    const TimeGrid fine_grid(o.final_time, 2 * steps);
    const MarchResult fine = march(space, mcase.march_config(fine_grid));
    out.max_transmission = std::max(out.max_transmission, fine.max_transmission);
    out.max_relative_residual = std::max(out.max_relative_residual, fine.max_relative_residual);
    for (int n = 0; n <= steps; ++n) {
        HDGState x = fine.states[2 * n];
        x *= 2.0;
        x.axpy(-1.0, coarse.states[n]);
        const double t = grid.node(n);
        out.err_u_max = std::max(out.err_u_max, l2_error_u(space, x.u, exact_u(t)));
        out.err_q_max = std::max(out.err_q_max, l2_error_q(space, x.q, exact_q(t)));
        if (n == steps)
            out.final_state = std::move(x);
    }
    return out;
}

} // namespace

ConvergenceTable run_convergence(const ManufacturedCase& mcase, const ConvergenceOptions& o)
{
    if (o.levels < 1)
        throw std::invalid_argument("run_convergence: levels must be positive");
    if (o.degree < 0 || o.degree > 3)
        throw std::invalid_argument("run_convergence: degree must lie in 0..3");

    ConvergenceTable table;
    table.case_name = mcase.name;
    table.degree = o.degree;
    table.alpha = mcase.alpha;
    table.tau = o.tau.describe();
    table.final_time = o.final_time;
    table.dt_rule = to_string(o.dt_rule);
    table.time_extrapolation = o.time_extrapolation;

    SimplicialMesh mesh = mcase.mesh(o.coarse_n);
    int n = o.coarse_n;
    for (int level = 0; level < o.levels; ++level) {
        const auto start = std::chrono::steady_clock::now();
        const int steps = steps_for_level(o, level);
        try {
            const MeshMetrics metrics = compute_metrics(mesh);
            const HdgSpace space(mesh, o.degree, o.tau);
            const LevelResult lr = run_level(mcase, space, o, steps);
            const Postprocessor post(space);
            const PostState ustar = post.apply(lr.final_state);
            const double T = o.final_time;

            ConvergenceRow row;
            row.n = n;
            row.steps = steps;
            row.h = metrics.h;
            row.dt = T / steps;
            row.err_u = l2_error_u(space, lr.final_state.u, [&](const Point& x) { return mcase.u(x, T); });
            row.err_q = l2_error_q(space, lr.final_state.q, [&](const Point& x) { return mcase.q(x, T); });
            row.err_ustar = post.l2_error(ustar, [&](const Point& x) { return mcase.u(x, T); });
            row.err_u_max = lr.err_u_max;
            row.err_q_max = lr.err_q_max;
            row.max_transmission = lr.max_transmission;
            row.max_relative_residual = lr.max_relative_residual;
            const KappaResult kappa = compute_kappa(mcase.alpha, T, metrics.rho, o.c_kd);
            row.kappa = kappa.kappa;
            row.kappa_clamped = kappa.clamped;
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            table.rows.push_back(row);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "level " << level << " (n = " << n << ", N = " << steps << "): " << e.what();
            throw std::runtime_error(os.str());
        }
        if (level + 1 < o.levels) {
            mesh = refine_uniform(mesh);
            n *= 2;
        }
    }
    table.compute_slopes();
    return table;
}

std::vector<ProjectionRow> projection_study(int dim, int degree, const Stabilization& tau, int levels,
                                            int coarse_n)
{
    const ManufacturedCase mcase = make_case(dim == 1 ? "sine1d" : "sine2d", 0.0);
    const ScalarField u = mcase.phi;
    const VectorField q = [&](const Point& x) -> Point { return -mcase.grad_phi(x); };
    std::vector<ProjectionRow> rows;
    SimplicialMesh mesh = mcase.mesh(coarse_n);
    for (int level = 0; level < levels; ++level) {
        const HdgSpace space(mesh, degree, tau);
        HDGState s = space.zero_state();
        ProjectionRow row;
        row.h = compute_metrics(mesh).h;
        for (int K = 0; K < mesh.num_elements(); ++K) {
            auto [pq, pu] = project_VW(space, q, u, K);
            const auto r = projection_residuals(space, q, u, K, pq, pu);
            row.max_residual = std::max({row.max_residual, r[0], r[1], r[2]});
            space.q_block(s.q, K) = pq;
            space.u_block(s.u, K) = pu;
        }
        row.err_u = l2_error_u(space, s.u, u);
        row.err_q = l2_error_q(space, s.q, q);
        if (!rows.empty()) {
            const double lh = std::log(rows.back().h / row.h);
            row.slope_u = std::log(rows.back().err_u / row.err_u) / lh;
            row.slope_q = std::log(rows.back().err_q / row.err_q) / lh;
        }
        rows.push_back(row);
        if (level + 1 < levels)
            mesh = refine_uniform(mesh);
    }
    return rows;
}

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt(const std::optional<double>& v)
{
    return v ? fmt(*v) : std::string();
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

} // namespace

void emit_csv(const ConvergenceTable& table, std::ostream& out)
{
    out << csv_header << '\n';
    for (const ConvergenceRow& r : table.rows)
        out << fmt(r.h) << ',' << fmt(r.dt) << ',' << fmt(r.err_u) << ',' << fmt(r.err_q) << ','
            << fmt(r.err_ustar) << ',' << fmt(r.slope_u) << ',' << fmt(r.slope_q) << ',' << fmt(r.slope_ustar)
            << '\n';
}

void emit_csv(const ConvergenceTable& table, const std::string& path)
{
    std::ofstream out = open_out(path);
    emit_csv(table, out);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

void emit_plotdata(const ConvergenceTable& table, std::ostream& out)
{
    const auto block = [&](const char* name, double ConvergenceRow::*field) {
        out << "# " << name << '\n';
        for (const ConvergenceRow& r : table.rows)
            out << fmt(std::log10(r.h)) << ' ' << fmt(std::log10(r.*field)) << '\n';
    };
    block("err_u", &ConvergenceRow::err_u);
    out << "\n\n";
    block("err_q", &ConvergenceRow::err_q);
    out << "\n\n";
    block("err_ustar", &ConvergenceRow::err_ustar);
}

void emit_plotdata(const ConvergenceTable& table, const std::string& path)
{
    std::ofstream out = open_out(path);
    emit_plotdata(table, out);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<ConvergenceRow> parse_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw std::runtime_error("parse_csv: missing or unexpected header");
    std::vector<ConvergenceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        while (cells.size() < 8)
            cells.emplace_back();
        if (cells.size() != 8)
            throw std::runtime_error("parse_csv: expected 8 fields in '" + line + "'");
        const auto num = [](const std::string& s) { return std::stod(s); };
        const auto opt = [](const std::string& s) { return s.empty() ? std::optional<double>() : std::stod(s); };
        ConvergenceRow r;
        r.h = num(cells[0]);
        r.dt = num(cells[1]);
        r.err_u = num(cells[2]);
        r.err_q = num(cells[3]);
        r.err_ustar = num(cells[4]);
        r.slope_u = opt(cells[5]);
        r.slope_q = opt(cells[6]);
        r.slope_ustar = opt(cells[7]);
        rows.push_back(r);
    }
    return rows;
}

void print_table(const ConvergenceTable& t, std::ostream& out)
{
    out << "case " << t.case_name << ", alpha " << t.alpha << ", k " << t.degree << ", tau " << t.tau << ", T "
        << t.final_time << ", dt rule " << t.dt_rule << (t.time_extrapolation ? " (extrapolated in dt)" : "")
        << '\n';
    const auto slope = [](const std::optional<double>& s) {
        std::ostringstream os;
        if (s)
            os << std::fixed << std::setprecision(2) << *s;
        else
            os << "-";
        return os.str();
    };
    out << std::setw(5) << "n" << std::setw(7) << "N" << std::setw(12) << "err_u" << std::setw(7) << "rate"
        << std::setw(12) << "err_q" << std::setw(7) << "rate" << std::setw(12) << "err_u*" << std::setw(7) << "rate"
        << std::setw(12) << "max_n e_u" << std::setw(12) << "max_n e_q" << std::setw(11) << "transm."
        << std::setw(10) << "sqrtlogk" << std::setw(9) << "sec" << '\n';
    for (const ConvergenceRow& r : t.rows) {
        out << std::setw(5) << r.n << std::setw(7) << r.steps << std::scientific << std::setprecision(3)
            << std::setw(12) << r.err_u << std::setw(7) << slope(r.slope_u) << std::scientific << std::setw(12)
            << r.err_q << std::setw(7) << slope(r.slope_q) << std::scientific << std::setw(12) << r.err_ustar
            << std::setw(7) << slope(r.slope_ustar) << std::scientific << std::setw(12) << r.err_u_max
            << std::setw(12) << r.err_q_max << std::setw(11) << std::setprecision(2) << r.max_transmission
            << std::fixed << std::setw(9) << std::setprecision(3) << std::sqrt(std::log(r.kappa))
            << (r.kappa_clamped ? "*" : " ") << std::setw(9) << std::setprecision(2) << r.seconds << '\n';
        out.unsetf(std::ios::floatfield);
    }
    out << "sqrt(log kappa) is reported up to the unknown constant C_kd (taken as 1)";
    out << "; * marks kappa clamped to e\n";
}

} // namespace fhdg
