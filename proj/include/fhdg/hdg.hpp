#pragma once

// HDG discretization of  q + grad u = 0,  sigma u + c0 div q = rhs  with the
// numerical trace  qhat.n = q.n + tau (u - uhat).
//
// Unknown layout: u has nW coefficients per element; q has d * nW per element
// (component-major); uhat has nM coefficients per face.  Local face i of an
// element is opposite its local vertex i.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fhdg/basis.hpp"
#include "fhdg/mesh.hpp"
#include "fhdg/quadrature.hpp"

namespace fhdg {

/// Raised when a local or condensed system cannot be factorized.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Face-wise constant, nonnegative stabilization on the element boundaries.
struct Stabilization {
    enum class Mode { constant, single_face };

    Mode mode = Mode::constant;
    double value = 1.0;      ///< tau_0 for the constant mode
    int designated_face = 0; ///< local face carrying 1/h_K in single-face mode

    static Stabilization constant(double tau0);
    static Stabilization single_face(int local_face = 0);

    double on_face(const SimplicialMesh& mesh, int K, int local_face) const;
    std::string describe() const;
};

struct HDGState {
    Eigen::VectorXd u;
    Eigen::VectorXd q;
    Eigen::VectorXd uhat;

    HDGState& operator+=(const HDGState& other);
    HDGState& operator*=(double s);
    void axpy(double a, const HDGState& x);
};

/// Time-independent local matrices of one element.
struct ElementMatrices {
    Eigen::MatrixXd mass;               ///< (phi_i, phi_j)_K
    Eigen::MatrixXd div;                ///< B(i, (c,j)) = (phi_i, d_c phi_j)_K
    Eigen::MatrixXd tau_uu;             ///< sum_F tau_F <phi_i, phi_j>_F
    std::vector<Eigen::MatrixXd> coupling;  ///< E_F(i, m) = <phi_i, mu_m>_F
    std::vector<Eigen::MatrixXd> normal;    ///< C_F((c,j), m) = <mu_m, phi_j n_c>_F
    std::vector<Eigen::MatrixXd> tau_ul;    ///< tau_F E_F
    std::vector<Eigen::MatrixXd> tau_ll;    ///< tau_F <mu_m, mu_n>_F
    std::vector<double> tau;
    std::vector<Point> normals;
};

/// Discrete spaces W_h, V_h, M_h on a mesh with the element matrices and
/// quadrature tables shared by the solvers.
class HdgSpace {
public:
    HdgSpace(SimplicialMesh mesh, int degree, Stabilization tau = Stabilization::constant(1.0));

    const SimplicialMesh& mesh() const noexcept { return mesh_; }
    int degree() const noexcept { return degree_; }
    int dim() const noexcept { return mesh_.dim(); }
    const Stabilization& stabilization() const noexcept { return tau_; }

    int n_w() const noexcept { return basis_.size(); }
    int n_v() const noexcept { return dim() * basis_.size(); }
    int n_m() const noexcept { return face_basis_.size(); }
    int faces_per_element() const noexcept { return dim() + 1; }

    const ElementBasis& basis() const noexcept { return basis_; }
    const FaceBasis& face_basis() const noexcept { return face_basis_; }
    const ElementMatrices& matrices(int K) const { return matrices_[K]; }
    const ElementGeometry& geometry(int K) const { return geometry_[K]; }

    HDGState zero_state() const;

    auto u_block(Eigen::VectorXd& v, int K) const { return v.segment(K * n_w(), n_w()); }
    auto u_block(const Eigen::VectorXd& v, int K) const { return v.segment(K * n_w(), n_w()); }
    auto q_block(Eigen::VectorXd& v, int K) const { return v.segment(K * n_v(), n_v()); }
    auto q_block(const Eigen::VectorXd& v, int K) const { return v.segment(K * n_v(), n_v()); }
    auto m_block(Eigen::VectorXd& v, int F) const { return v.segment(F * n_m(), n_m()); }
    auto m_block(const Eigen::VectorXd& v, int F) const { return v.segment(F * n_m(), n_m()); }

    /// (f, phi_i)_K for every element, concatenated.
    Eigen::VectorXd load(const ScalarField& f) const;
    /// Face L2 projection onto M_h of f (all faces, or boundary faces only).
    Eigen::VectorXd project_faces(const ScalarField& f, bool boundary_only = false) const;
    /// Element L2 projection onto W_h.
    Eigen::VectorXd project_elements(const ScalarField& f) const;

    double eval_u(const Eigen::VectorXd& u, int K, const Point& x) const;
    Point eval_q(const Eigen::VectorXd& q, int K, const Point& x) const;

    /// Element rule used for loads (degree 2k + 4) with its physical points per element.
    const QuadratureRule& element_rule() const noexcept { return element_rule_; }
    const std::vector<Point>& element_points(int K) const { return element_points_[K]; }
    /// Basis values at the element rule's points (column per point).
    const Eigen::MatrixXd& element_table() const noexcept { return element_table_; }

    /// Face rule (degree 2k + 2) and element-basis values at its points seen from (K, i).
    const QuadratureRule& face_rule() const noexcept { return face_rule_; }
    Eigen::MatrixXd face_table(int K, int i) const;
    const Eigen::MatrixXd& face_basis_table() const noexcept { return face_basis_table_; }

private:
    SimplicialMesh mesh_;
    int degree_;
    Stabilization tau_;
    ElementBasis basis_;
    FaceBasis face_basis_;
    std::vector<ElementGeometry> geometry_;
    std::vector<ElementMatrices> matrices_;
    QuadratureRule element_rule_;
    QuadratureRule face_rule_;
    Eigen::MatrixXd element_table_;
    Eigen::MatrixXd face_basis_table_;
    std::vector<std::vector<Point>> element_points_;
};

/// Static condensation data of one element for fixed (sigma, c0).
struct LocalOperator {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;  ///< [A, -B^T; B, (sigma/c0) M + T_uu]
    Eigen::MatrixXd trace_map;   ///< (q, u) response to the element's face traces
    Eigen::MatrixXd load_map;    ///< (q, u) response to a W-load
    Eigen::MatrixXd flux_of_load; ///< face fluxes produced by a W-load
    Eigen::MatrixXd condensed;   ///< element contribution to the trace system
};

/// History contribution H = sum_{j>=1} w_j state^{n-j}; enters the local
/// equations and the transmission condition through the same numerical trace.
struct StepData {
    Eigen::VectorXd u_load;          ///< (rhs, w) for every element
    const HDGState* history = nullptr;
    Eigen::VectorXd dirichlet;       ///< uhat coefficients (boundary faces used)
};

/// The globally coupled system in the interior-face traces.  Factorized once
/// (sparse Cholesky) and reused for every right-hand side.
class CondensedSystem {
public:
    CondensedSystem(const HdgSpace& space, double sigma, double c0);

    double sigma() const noexcept { return sigma_; }
    double c0() const noexcept { return c0_; }
    int size() const noexcept { return static_cast<int>(matrix_.rows()); }
    const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }
    const LocalOperator& local(int K) const { return local_[K]; }

    HDGState solve(const StepData& data) const;

    /// Number of solve() calls (back-substitutions) performed.
    long solves() const noexcept { return solves_; }

private:
    const HdgSpace* space_;
    double sigma_;
    double c0_;
    std::vector<LocalOperator> local_;
    std::vector<int> interior_index_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
    mutable long solves_ = 0;
};

/// D_K(x) = B q + T_uu u - sum_F T_ul uhat  (the divergence form with the trace).
Eigen::VectorXd local_divergence(const HdgSpace& space, const HDGState& x, int K);
/// Phi_F(x) = <qhat.n, mu>_F for local face i of K.
Eigen::VectorXd local_flux(const HdgSpace& space, const HDGState& x, int K, int i);

struct Residuals {
    double flux_eq = 0.0;        ///< (q, r) - (u, div r) + <uhat, r.n>
    double balance_eq = 0.0;     ///< sigma (u, w) + c0 D(x) + D(H) - load
    double dirichlet = 0.0;      ///< <uhat - g, mu> on boundary faces
    double transmission = 0.0;   ///< |sum over both sides of c0 Phi(x) + Phi(H)| / c0
    double jump = 0.0;           ///< |sum over both sides of Phi(x)| (instantaneous)
    double scale = 1.0;

    double max_relative() const;
};

Residuals evaluate_residuals(const HdgSpace& space, const HDGState& x, double sigma, double c0,
                             const StepData& data);

struct SteadyProblem {
    double sigma = 0.0;
    double c0 = 1.0;
    ScalarField source;                        ///< volume rhs
    std::optional<Eigen::VectorXd> previous_u; ///< adds sigma (u_prev, w)
    const HDGState* history = nullptr;
    ScalarField dirichlet;
};

StepData make_step_data(const HdgSpace& space, const SteadyProblem& problem);

/// Builds, condenses, and solves the discrete system once.
HDGState solve_steady(const HdgSpace& space, const SteadyProblem& problem);

/// qhat.n at the face rule's points of each local face of K.
std::vector<Eigen::VectorXd> numerical_trace(const HdgSpace& space, const HDGState& state, int K);

/// The coupled projection (Pi_V q, Pi_W u) on element K.
std::pair<Eigen::VectorXd, Eigen::VectorXd> project_VW(const HdgSpace& space, const VectorField& q,
                                                       const ScalarField& u, int K);

/// Residuals of the three orthogonality blocks of project_VW (max abs).
std::array<double, 3> projection_residuals(const HdgSpace& space, const VectorField& q, const ScalarField& u,
                                           int K, const Eigen::VectorXd& pq, const Eigen::VectorXd& pu);

/// u = Pi_W u0, q = Pi_V q0 with q0 = -grad u0, uhat = P_M u0.
HDGState initial_state(const HdgSpace& space, const ScalarField& u0, const VectorField& grad_u0);

/// Elementwise L2 errors against exact fields (quadrature of degree 2k + 8).
double l2_error_u(const HdgSpace& space, const Eigen::VectorXd& u, const ScalarField& exact);
double l2_error_q(const HdgSpace& space, const Eigen::VectorXd& q, const VectorField& exact);

} // namespace fhdg
