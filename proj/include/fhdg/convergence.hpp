#pragma once

// Convergence studies over uniformly refined meshes, CSV / plot-data output.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhdg/manufactured.hpp"
#include "fhdg/postprocess.hpp"

namespace fhdg {

enum class DtRule {
    proportional, ///< N grows like h^{-(k+1)}
    fixed,        ///< the same N on every level
};

DtRule parse_dt_rule(const std::string& s);
std::string to_string(DtRule rule);

struct ConvergenceOptions {
    int degree = 1;
    int levels = 4;
    int coarse_n = 8;          ///< elements per direction on the coarsest level
    double final_time = 1.0;
    Stabilization tau = Stabilization::constant(1.0);
    DtRule dt_rule = DtRule::proportional;
    int coarse_steps = 0;      ///< 0: derived from max_steps
    int max_steps = 4096;      ///< step budget of the finest march
    bool time_extrapolation = true;
    double c_kd = 1.0;
};

struct ConvergenceRow {
    int n = 0;
    int steps = 0;
    double h = 0.0;
    double dt = 0.0;
    double err_u = 0.0;
    double err_q = 0.0;
    double err_ustar = 0.0;
    std::optional<double> slope_u;
    std::optional<double> slope_q;
    std::optional<double> slope_ustar;

    // reported alongside, not part of the CSV
    double err_u_max = 0.0;   ///< max over time steps
    double err_q_max = 0.0;
    double max_transmission = 0.0;
    double max_relative_residual = 0.0;
    double kappa = 0.0;
    bool kappa_clamped = false;
    double seconds = 0.0;
};

struct ConvergenceTable {
    std::string case_name;
    int degree = 0;
    double alpha = 0.0;
    std::string tau;
    double final_time = 1.0;
    std::string dt_rule;
    bool time_extrapolation = false;
    std::vector<ConvergenceRow> rows;

    /// Fills the slope columns from consecutive rows.
    void compute_slopes();
};

/// Steps of the march on level l under the options' rule.
int steps_for_level(const ConvergenceOptions& options, int level);

ConvergenceTable run_convergence(const ManufacturedCase& mcase, const ConvergenceOptions& options);

inline constexpr const char* csv_header = "h,dt,err_u,err_q,err_ustar,slope_u,slope_q,slope_ustar";

void emit_csv(const ConvergenceTable& table, std::ostream& out);
void emit_csv(const ConvergenceTable& table, const std::string& path);
void emit_plotdata(const ConvergenceTable& table, std::ostream& out);
void emit_plotdata(const ConvergenceTable& table, const std::string& path);
/// Reads the numeric fields written by emit_csv.
std::vector<ConvergenceRow> parse_csv(std::istream& in);

struct ProjectionRow {
    double h = 0.0;
    double err_u = 0.0; ///< ||Pi_W u - u||
    double err_q = 0.0; ///< ||Pi_V q - q||
    std::optional<double> slope_u;
    std::optional<double> slope_q;
    double max_residual = 0.0; ///< worst orthogonality residual of the projection
};

/// Errors of the coupled projection of (q, u) = (-grad u, u), u = sin(pi x)
/// (or sin(pi x) sin(pi y)), on uniformly refined meshes.
std::vector<ProjectionRow> projection_study(int dim, int degree, const Stabilization& tau, int levels,
                                            int coarse_n);

/// Human-readable table with the extra columns and the kappa report.
void print_table(const ConvergenceTable& table, std::ostream& out);

} // namespace fhdg
