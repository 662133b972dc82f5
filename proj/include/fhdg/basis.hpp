#pragma once

// Polynomial spaces on simplexes and faces, affine element geometry, and the
// local Gram matrices the HDG forms are built from.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fhdg/mesh.hpp"
#include "fhdg/quadrature.hpp"

namespace fhdg {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

int dim_polynomials(int degree, int dim);

/// Basis of P_k on the reference simplex, in reference coordinates.
///
/// The orthonormal variant is Gram-Schmidt applied to monomials ordered by
/// total degree, so its first dim P_{k-1} members span P_{k-1}.
class ElementBasis {
public:
    enum class Kind { orthonormal, monomial };

    ElementBasis(int dim, int degree, Kind kind = Kind::orthonormal);

    int dim() const noexcept { return dim_; }
    int degree() const noexcept { return degree_; }
    int size() const noexcept { return static_cast<int>(exponents_.size()); }

    Eigen::VectorXd values(const Point& ref) const;
    /// size x dim, gradients with respect to reference coordinates
    Eigen::MatrixXd gradients(const Point& ref) const;

private:
    int dim_;
    int degree_;
    std::vector<std::array<int, 2>> exponents_;
    Eigen::MatrixXd coeffs_; // row i: basis function i in monomial coordinates
};

/// Orthonormal basis of P_k(F) on the unit reference face, parametrized by
/// s in [0, 1] from the lower to the higher global face vertex.  For d = 1 the
/// face is a point and the basis is {1}.
class FaceBasis {
public:
    FaceBasis(int element_dim, int degree);

    int degree() const noexcept { return degree_; }
    int size() const noexcept { return element_dim_ == 1 ? 1 : degree_ + 1; }
    Eigen::VectorXd values(double s) const;

private:
    int element_dim_;
    int degree_;
};

/// Affine map x = origin + J xi of an element.  For d = 1 the map is embedded
/// as J = diag(x1 - x0, 1).
struct ElementGeometry {
    Point origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse;
    double det = 0.0; ///< |det J|

    ElementGeometry(const SimplicialMesh& mesh, int K);

    Point to_physical(const Point& ref) const { return origin + jacobian * ref; }
    Point to_reference(const Point& x) const { return inverse * (x - origin); }
};

/// Reference-element coordinates of points on local face i of K given by the
/// face parameter s (ignored for d = 1).
Point face_point_on_reference(const SimplicialMesh& mesh, int K, int i, double s);

/// Physical point on face F at parameter s.
Point face_point(const SimplicialMesh& mesh, int F, double s);

// Local forms, exact for polynomial data when the rules have the degree
// requested below (2k on elements, 2k on faces).
Eigen::MatrixXd local_mass(const SimplicialMesh& mesh, int K, const ElementBasis& basis);
/// G_c(i, j) = (phi_i, d_c phi_j)_K for c < d.
std::vector<Eigen::MatrixXd> local_gradmass(const SimplicialMesh& mesh, int K, const ElementBasis& basis);
/// E(i, m) = <phi_i, mu_m>_F on local face i_face of K.
Eigen::MatrixXd face_coupling(const SimplicialMesh& mesh, int K, int i_face, const ElementBasis& basis,
                              const FaceBasis& face_basis);

/// L2 projections (Gram system solved with the rule of degree 2k + extra).
Eigen::VectorXd l2_project_element(const ScalarField& f, const SimplicialMesh& mesh, int K,
                                   const ElementBasis& basis, int extra_degree = 4);
Eigen::VectorXd l2_project_face(const ScalarField& f, const SimplicialMesh& mesh, int F,
                                const FaceBasis& basis, int extra_degree = 4);

/// Evaluates sum_i c_i phi_i at the physical point x of element K.
double evaluate(const SimplicialMesh& mesh, int K, const ElementBasis& basis,
                const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x);

} // namespace fhdg
