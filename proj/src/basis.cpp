#include "fhdg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace fhdg {

namespace {

Point reference_vertex(int dim, int i)
{
    if (dim == 1)
        return Point(i == 0 ? 0.0 : 1.0, 0.0);
    static const std::array<Point, 3> tri{Point(0.0, 0.0), Point(1.0, 0.0), Point(0.0, 1.0)};
    return tri[i];
}

double legendre(int n, double x)
{
    double p0 = 1.0, p1 = x;
    if (n == 0)
        return p0;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

} // namespace

int dim_polynomials(int degree, int dim)
{
    if (degree < 0)
        return 0;
    return dim == 1 ? degree + 1 : (degree + 1) * (degree + 2) / 2;
}

ElementBasis::ElementBasis(int dim, int degree, Kind kind) : dim_(dim), degree_(degree)
{
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("ElementBasis: unsupported dimension");
    if (degree < 0)
        throw std::invalid_argument("ElementBasis: negative degree");
    for (int p = 0; p <= degree; ++p) {
        if (dim == 1)
            exponents_.push_back({p, 0});
        else
            for (int b = 0; b <= p; ++b)
                exponents_.push_back({p - b, b});
    }
    const int n = size();
    coeffs_ = Eigen::MatrixXd::Identity(n, n);
    if (kind == Kind::monomial)
        return;

    const QuadratureRule rule = simplex_rule(dim, 2 * degree);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd m = values(rule.points[q]);
        gram += rule.weights[q] * m * m.transpose();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("ElementBasis: monomial Gram matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    coeffs_ = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd ElementBasis::values(const Point& ref) const
{
    Eigen::VectorXd m(size());
    for (int j = 0; j < size(); ++j)
        m(j) = std::pow(ref.x(), exponents_[j][0]) * std::pow(ref.y(), exponents_[j][1]);
    return coeffs_ * m;
}

Eigen::MatrixXd ElementBasis::gradients(const Point& ref) const
{
    Eigen::MatrixXd dm(size(), dim_);
    for (int j = 0; j < size(); ++j) {
        const auto [a, b] = exponents_[j];
        dm(j, 0) = a == 0 ? 0.0 : a * std::pow(ref.x(), a - 1) * std::pow(ref.y(), b);
        if (dim_ == 2)
            dm(j, 1) = b == 0 ? 0.0 : b * std::pow(ref.x(), a) * std::pow(ref.y(), b - 1);
    }
    return coeffs_ * dm;
}

FaceBasis::FaceBasis(int element_dim, int degree) : element_dim_(element_dim), degree_(degree)
{
    if (element_dim != 1 && element_dim != 2)
        throw std::invalid_argument("FaceBasis: unsupported dimension");
    if (degree < 0)
        throw std::invalid_argument("FaceBasis: negative degree");
}

Eigen::VectorXd FaceBasis::values(double s) const
{
    Eigen::VectorXd v(size());
    if (element_dim_ == 1) {
        v(0) = 1.0;
        return v;
    }
    for (int j = 0; j <= degree_; ++j)
        v(j) = std::sqrt(2.0 * j + 1.0) * legendre(j, 2.0 * s - 1.0);
    return v;
}

ElementGeometry::ElementGeometry(const SimplicialMesh& mesh, int K)
{
    origin = mesh.vertex(mesh.element_vertex(K, 0));
    jacobian.setIdentity();
    for (int c = 0; c < mesh.dim(); ++c)
        jacobian.col(c) = mesh.vertex(mesh.element_vertex(K, c + 1)) - origin;
    if (mesh.dim() == 1)
        jacobian(1, 0) = 0.0;
    const double signed_det = jacobian.determinant();
    if (!(std::abs(signed_det) > 0.0))
        throw std::domain_error("degenerate element " + std::to_string(K));
    det = std::abs(signed_det);
    inverse = jacobian.inverse();
}

Point face_point_on_reference(const SimplicialMesh& mesh, int K, int i, double s)
{
    const int d = mesh.dim();
    if (d == 1)
        return reference_vertex(1, 1 - i);
    // local vertices of the face, ordered like the face's global vertices
    int a = (i + 1) % 3, b = (i + 2) % 3;
    if (mesh.element_vertex(K, a) > mesh.element_vertex(K, b))
        std::swap(a, b);
    return (1.0 - s) * reference_vertex(2, a) + s * reference_vertex(2, b);
}

Point face_point(const SimplicialMesh& mesh, int F, double s)
{
    if (mesh.dim() == 1)
        return mesh.vertex(mesh.face_vertex(F, 0));
    return (1.0 - s) * mesh.vertex(mesh.face_vertex(F, 0)) + s * mesh.vertex(mesh.face_vertex(F, 1));
}

Eigen::MatrixXd local_mass(const SimplicialMesh& mesh, int K, const ElementBasis& basis)
{
    const ElementGeometry geo(mesh, K);
    const QuadratureRule rule = simplex_rule(mesh.dim(), 2 * basis.degree());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd phi = basis.values(rule.points[q]);
        M += rule.weights[q] * geo.det * phi * phi.transpose();
    }
    return M;
}

std::vector<Eigen::MatrixXd> local_gradmass(const SimplicialMesh& mesh, int K, const ElementBasis& basis)
{
    const int d = mesh.dim();
    const ElementGeometry geo(mesh, K);
    const QuadratureRule rule = simplex_rule(d, 2 * basis.degree());
    const Eigen::MatrixXd jinv_t = geo.inverse.transpose().topLeftCorner(d, d);
    std::vector<Eigen::MatrixXd> G(d, Eigen::MatrixXd::Zero(basis.size(), basis.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd phi = basis.values(rule.points[q]);
        const Eigen::MatrixXd grad = basis.gradients(rule.points[q]) * jinv_t.transpose();
        for (int c = 0; c < d; ++c)
            G[c] += rule.weights[q] * geo.det * phi * grad.col(c).transpose();
    }
    return G;
}

Eigen::MatrixXd face_coupling(const SimplicialMesh& mesh, int K, int i_face, const ElementBasis& basis,
                              const FaceBasis& face_basis)
{
    const int F = mesh.element_face(K, i_face);
    const QuadratureRule rule = simplex_rule(mesh.dim() - 1, basis.degree() + face_basis.degree());
    const double measure = mesh.face_measure(F);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(basis.size(), face_basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = rule.points[q].x();
        const Eigen::VectorXd phi = basis.values(face_point_on_reference(mesh, K, i_face, s));
        E += rule.weights[q] * measure * phi * face_basis.values(s).transpose();
    }
    return E;
}

Eigen::VectorXd l2_project_element(const ScalarField& f, const SimplicialMesh& mesh, int K,
                                   const ElementBasis& basis, int extra_degree)
{
    const ElementGeometry geo(mesh, K);
    const QuadratureRule rule = simplex_rule(mesh.dim(), 2 * basis.degree() + extra_degree);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd phi = basis.values(rule.points[q]);
        const double w = rule.weights[q] * geo.det;
        M += w * phi * phi.transpose();
        b += w * f(geo.to_physical(rule.points[q])) * phi;
    }
    return M.llt().solve(b);
}

Eigen::VectorXd l2_project_face(const ScalarField& f, const SimplicialMesh& mesh, int F,
                                const FaceBasis& basis, int extra_degree)
{
    const QuadratureRule rule = simplex_rule(mesh.dim() - 1, 2 * basis.degree() + extra_degree);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = rule.points[q].x();
        b += rule.weights[q] * f(face_point(mesh, F, s)) * basis.values(s);
    }
    // the face basis is orthonormal on the unit reference face
    return b;
}

double evaluate(const SimplicialMesh& mesh, int K, const ElementBasis& basis,
                const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x)
{
    const ElementGeometry geo(mesh, K);
    return basis.values(geo.to_reference(x)).dot(coeffs);
}

} // namespace fhdg
