#pragma once

// Test-only reference solvers, assembled independently of the library's
// element matrices, static condensation and convolution quadrature.

#include <vector>

#include "fhdg/hdg.hpp"

namespace oracle {

/// Dense solve of every HDG equation in all unknowns (u, q, uhat):
///   (q, r) - (u, div r) + <uhat, r.n> = 0
///   sigma (u, w) - c0 (q, grad w) + c0 <qhat.n, w> = (f, w) + sigma (u_prev, w)
///   sum over both sides <qhat.n, mu> = 0 on interior faces
///   <uhat - g, mu> = 0 on boundary faces
/// Matrices use rules of degree 2k + 6.  The data f and g use the library's
/// rule degrees (2k + 4 on elements, 2k + 2 on faces).
fhdg::HDGState monolithic_solve(const fhdg::SimplicialMesh& mesh, int degree, const fhdg::Stabilization& tau,
                                double sigma, double c0, const fhdg::ScalarField& source,
                                const Eigen::VectorXd* previous_u, const fhdg::ScalarField& dirichlet);

/// Backward-Euler heat HDG: u_t - Lap u = f from a given initial state.
std::vector<fhdg::HDGState> heat_march(const fhdg::SimplicialMesh& mesh, int degree, const fhdg::Stabilization& tau,
                                       const fhdg::HDGState& initial, double final_time, int steps,
                                       const std::function<double(const fhdg::Point&, double)>& source,
                                       const std::function<double(const fhdg::Point&, double)>& dirichlet);

} // namespace oracle
