#include "fhdg/hdg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fhdg {

namespace {

struct ProjectionSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

// Rows: (q_c, r) for the first dim P_{k-1} basis members per component, then
// (u, w) likewise, then <q.n + tau u, mu>_F for every local face.
ProjectionSystem assemble_projection(const HdgSpace& space, const VectorField& q, const ScalarField& u, int K)
{
    const int d = space.dim(), nw = space.n_w(), nv = space.n_v(), nm = space.n_m();
    const int nl = dim_polynomials(space.degree() - 1, d);
    const int nf = space.faces_per_element();
    const ElementMatrices& em = space.matrices(K);
    const ElementGeometry& geo = space.geometry(K);

    ProjectionSystem sys;
    sys.matrix = Eigen::MatrixXd::Zero(nv + nw, nv + nw);
    sys.rhs = Eigen::VectorXd::Zero(nv + nw);

    const QuadratureRule rule = simplex_rule(d, 2 * space.degree() + 8);
    Eigen::MatrixXd qmom = Eigen::MatrixXd::Zero(nl, d);
    Eigen::VectorXd umom = Eigen::VectorXd::Zero(nl);
    for (std::size_t p = 0; p < rule.size(); ++p) {
        const Eigen::VectorXd phi = space.basis().values(rule.points[p]).head(nl);
        const Point x = geo.to_physical(rule.points[p]);
        const double w = rule.weights[p] * geo.det;
        const Point qx = q(x);
        for (int c = 0; c < d; ++c)
            qmom.col(c) += w * qx[c] * phi;
        umom += w * u(x) * phi;
    }

    int row = 0;
    for (int c = 0; c < d; ++c) {
        sys.matrix.block(row, c * nw, nl, nw) = em.mass.topRows(nl);
        sys.rhs.segment(row, nl) = qmom.col(c);
        row += nl;
    }
    sys.matrix.block(row, nv, nl, nw) = em.mass.topRows(nl);
    sys.rhs.segment(row, nl) = umom;
    row += nl;

    const QuadratureRule& frule = space.face_rule();
    for (int i = 0; i < nf; ++i) {
        const int F = space.mesh().element_face(K, i);
        const double measure = space.mesh().face_measure(F);
        sys.matrix.block(row, 0, nm, nv) = em.normal[i].transpose();
        sys.matrix.block(row, nv, nm, nw) = em.tau_ul[i].transpose();
        const Point n = em.normals[i];
        for (std::size_t p = 0; p < frule.size(); ++p) {
            const Point x = geo.to_physical(face_point_on_reference(space.mesh(), K, i, frule.points[p].x()));
            const double value = q(x).head(d).dot(n.head(d)) + em.tau[i] * u(x);
            sys.rhs.segment(row, nm) += frule.weights[p] * measure * value * space.face_basis_table().col(p);
        }
        row += nm;
    }
    return sys;
}

} // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> project_VW(const HdgSpace& space, const VectorField& q,
                                                       const ScalarField& u, int K)
{
    const ElementMatrices& em = space.matrices(K);
    if (!(*std::max_element(em.tau.begin(), em.tau.end()) > 0.0)) {
        std::ostringstream os;
        os << "projection needs a positive stabilization on some face of element " << K;
        throw ConfigurationError(os.str());
    }
    const ProjectionSystem sys = assemble_projection(space, q, u, K);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.matrix);
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << "projection system of element " << K << " is singular";
        throw ConfigurationError(os.str());
    }
    const Eigen::VectorXd x = lu.solve(sys.rhs);
    return {x.head(space.n_v()), x.tail(space.n_w())};
}

std::array<double, 3> projection_residuals(const HdgSpace& space, const VectorField& q, const ScalarField& u,
                                           int K, const Eigen::VectorXd& pq, const Eigen::VectorXd& pu)
{
    const ProjectionSystem sys = assemble_projection(space, q, u, K);
    Eigen::VectorXd x(space.n_v() + space.n_w());
    x << pq, pu;
    const Eigen::VectorXd r = sys.matrix * x - sys.rhs;
    const int nl = dim_polynomials(space.degree() - 1, space.dim());
    const int nq = space.dim() * nl;
    std::array<double, 3> out{0.0, 0.0, 0.0};
    if (nq > 0)
        out[0] = r.head(nq).lpNorm<Eigen::Infinity>();
    if (nl > 0)
        out[1] = r.segment(nq, nl).lpNorm<Eigen::Infinity>();
    out[2] = r.tail(r.size() - nq - nl).lpNorm<Eigen::Infinity>();
    return out;
}

HDGState initial_state(const HdgSpace& space, const ScalarField& u0, const VectorField& grad_u0)
{
    const VectorField q0 = [&](const Point& x) -> Point { return -grad_u0(x); };
    HDGState s = space.zero_state();
    for (int K = 0; K < space.mesh().num_elements(); ++K) {
        auto [pq, pu] = project_VW(space, q0, u0, K);
        space.q_block(s.q, K) = pq;
        space.u_block(s.u, K) = pu;
    }
    s.uhat = space.project_faces(u0);
    return s;
}

} // namespace fhdg
