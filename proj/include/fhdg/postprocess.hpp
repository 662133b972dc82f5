#pragma once

// Elementwise reconstruction u* in P_{k+1}(K):
//   (grad u*, grad w)_K = -(q_h, grad w)_K   for w in P_{k+1}(K)
//   (u*, 1)_K = (u_h, 1)_K
// The singular stiffness block is closed by a Lagrange multiplier row.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fhdg/hdg.hpp"

namespace fhdg {

/// u* coefficients in the orthonormal P_{k+1} basis, element-major.
struct PostState {
    int degree = 1;
    int per_element = 0;
    Eigen::VectorXd coeffs;

    auto block(int K) const { return coeffs.segment(K * per_element, per_element); }
};

/// Per-shape-class data: KKT factorization, gradient pairing with V_h, and
/// element means of W_h.  Classes are elements whose Jacobians agree.
struct PostprocessClass {
    Eigen::MatrixXd system;                 ///< [S, m; m^T, 0]
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd grad_pairing;           ///< (d_c psi_i, phi_j) stacked as [c blocks]
    Eigen::VectorXd star_mean;              ///< (psi_i, 1)_K
    Eigen::VectorXd w_mean;                 ///< (phi_j, 1)_K
};

class Postprocessor {
public:
    explicit Postprocessor(const HdgSpace& space);

    const ElementBasis& basis() const noexcept { return basis_; }
    int num_shape_classes() const noexcept { return static_cast<int>(classes_.size()); }
    int shape_class(int K) const { return class_of_[K]; }
    const PostprocessClass& class_data(int K) const { return classes_[class_of_[K]]; }

    Eigen::VectorXd element(const Eigen::VectorXd& u, const Eigen::VectorXd& q, int K) const;
    PostState apply(const HDGState& state) const;

    double eval(const PostState& s, int K, const Point& x) const;
    double l2_error(const PostState& s, const ScalarField& exact) const;

    /// Residuals (stiffness rows, mean row) of element K's equations, max abs.
    std::pair<double, double> residuals(const PostState& s, const HDGState& state, int K) const;

    /// Builds the class data of element K from scratch (no cache).
    PostprocessClass assemble(int K) const;

private:
    const HdgSpace* space_;
    ElementBasis basis_;
    QuadratureRule rule_;
    std::vector<PostprocessClass> classes_;
    std::vector<int> class_of_;
};

/// Stand-alone element postprocessing (builds the local system directly).
Eigen::VectorXd postprocess_element(const HdgSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& q,
                                    int K);

struct KappaResult {
    double kappa = 0.0;
    bool clamped = false; ///< solution had log kappa < 1 and was raised to e
    double residual = 0.0;
};

/// Solves kappa^(alpha+1) log kappa = C_kd^2 T^(alpha+1) / rho^2 for kappa > 1.
KappaResult compute_kappa(double alpha, double final_time, double rho, double c_kd = 1.0);

} // namespace fhdg
