#include "fhdg/hdg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fhdg {

Stabilization Stabilization::constant(double tau0)
{
    if (!(tau0 >= 0.0))
        throw std::invalid_argument("stabilization must be nonnegative");
    return Stabilization{Mode::constant, tau0, 0};
}

Stabilization Stabilization::single_face(int local_face)
{
    return Stabilization{Mode::single_face, 0.0, local_face};
}

double Stabilization::on_face(const SimplicialMesh& mesh, int K, int local_face) const
{
    if (mode == Mode::constant)
        return value;
    return local_face == designated_face ? 1.0 / mesh.element_diameter(K) : 0.0;
}

std::string Stabilization::describe() const
{
    std::ostringstream os;
    if (mode == Mode::constant)
        os << "constant(" << value << ")";
    else
        os << "single-face(1/h_K on local face " << designated_face << ")";
    return os.str();
}

HDGState& HDGState::operator+=(const HDGState& other)
{
    u += other.u;
    q += other.q;
    uhat += other.uhat;
    return *this;
}

HDGState& HDGState::operator*=(double s)
{
    u *= s;
    q *= s;
    uhat *= s;
    return *this;
}

void HDGState::axpy(double a, const HDGState& x)
{
    u += a * x.u;
    q += a * x.q;
    uhat += a * x.uhat;
}

HdgSpace::HdgSpace(SimplicialMesh mesh, int degree, Stabilization tau)
    : mesh_(std::move(mesh)),
      degree_(degree),
      tau_(tau),
      basis_(mesh_.dim(), degree),
      face_basis_(mesh_.dim(), degree),
      element_rule_(simplex_rule(mesh_.dim(), 2 * degree + 4)),
      face_rule_(simplex_rule(mesh_.dim() - 1, 2 * degree + 2))
{
    const int d = dim();
    const int nw = n_w();
    const int nm = n_m();
    const int nf = faces_per_element();

    element_table_.resize(nw, element_rule_.size());
    std::vector<Eigen::MatrixXd> ref_grads(element_rule_.size());
    for (std::size_t q = 0; q < element_rule_.size(); ++q) {
        element_table_.col(q) = basis_.values(element_rule_.points[q]);
        ref_grads[q] = basis_.gradients(element_rule_.points[q]);
    }
    face_basis_table_.resize(nm, face_rule_.size());
    for (std::size_t q = 0; q < face_rule_.size(); ++q)
        face_basis_table_.col(q) = face_basis_.values(face_rule_.points[q].x());

    geometry_.reserve(mesh_.num_elements());
    matrices_.resize(mesh_.num_elements());
    element_points_.resize(mesh_.num_elements());
    for (int K = 0; K < mesh_.num_elements(); ++K) {
        const ElementGeometry& geo = geometry_.emplace_back(mesh_, K);
        ElementMatrices& em = matrices_[K];

        em.mass = Eigen::MatrixXd::Zero(nw, nw);
        em.div = Eigen::MatrixXd::Zero(nw, d * nw);
        const Eigen::MatrixXd jinv = geo.inverse.topLeftCorner(d, d);
        for (std::size_t q = 0; q < element_rule_.size(); ++q) {
            const double w = element_rule_.weights[q] * geo.det;
            const auto phi = element_table_.col(q);
            const Eigen::MatrixXd grad = ref_grads[q] * jinv; // rows: physical gradients
            em.mass += w * phi * phi.transpose();
            for (int c = 0; c < d; ++c)
                em.div.middleCols(c * nw, nw) += w * phi * grad.col(c).transpose();
            element_points_[K].push_back(geo.to_physical(element_rule_.points[q]));
        }

        em.tau_uu = Eigen::MatrixXd::Zero(nw, nw);
        for (int i = 0; i < nf; ++i) {
            const int F = mesh_.element_face(K, i);
            const double measure = mesh_.face_measure(F);
            const double tau_f = tau_.on_face(mesh_, K, i);
            if (tau_f < 0.0)
                throw std::invalid_argument("stabilization must be nonnegative");
            const Point n = mesh_.outward_normal(K, i);
            const Eigen::MatrixXd T = face_table(K, i);

            Eigen::MatrixXd E = Eigen::MatrixXd::Zero(nw, nm);
            Eigen::MatrixXd face_mass = Eigen::MatrixXd::Zero(nw, nw);
            Eigen::MatrixXd trace_mass = Eigen::MatrixXd::Zero(nm, nm);
            for (std::size_t q = 0; q < face_rule_.size(); ++q) {
                const double w = face_rule_.weights[q] * measure;
                E += w * T.col(q) * face_basis_table_.col(q).transpose();
                face_mass += w * T.col(q) * T.col(q).transpose();
                trace_mass += w * face_basis_table_.col(q) * face_basis_table_.col(q).transpose();
            }
            Eigen::MatrixXd C(d * nw, nm);
            for (int c = 0; c < d; ++c)
                C.middleRows(c * nw, nw) = n[c] * E;

            em.tau_uu += tau_f * face_mass;
            em.coupling.push_back(E);
            em.normal.push_back(C);
            em.tau_ul.push_back(tau_f * E);
            em.tau_ll.push_back(tau_f * trace_mass);
            em.tau.push_back(tau_f);
            em.normals.push_back(n);
        }
    }
}

HDGState HdgSpace::zero_state() const
{
    return HDGState{Eigen::VectorXd::Zero(mesh_.num_elements() * n_w()),
                    Eigen::VectorXd::Zero(mesh_.num_elements() * n_v()),
                    Eigen::VectorXd::Zero(mesh_.num_faces() * n_m())};
}

Eigen::MatrixXd HdgSpace::face_table(int K, int i) const
{
    Eigen::MatrixXd T(n_w(), face_rule_.size());
    for (std::size_t q = 0; q < face_rule_.size(); ++q)
        T.col(q) = basis_.values(face_point_on_reference(mesh_, K, i, face_rule_.points[q].x()));
    return T;
}

Eigen::VectorXd HdgSpace::load(const ScalarField& f) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_elements() * n_w());
    for (int K = 0; K < mesh_.num_elements(); ++K) {
        auto block = u_block(out, K);
        const auto& pts = element_points_[K];
        for (std::size_t q = 0; q < element_rule_.size(); ++q)
            block += (element_rule_.weights[q] * geometry_[K].det * f(pts[q])) * element_table_.col(q);
    }
    return out;
}

Eigen::VectorXd HdgSpace::project_faces(const ScalarField& f, bool boundary_only) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_faces() * n_m());
    for (int F = 0; F < mesh_.num_faces(); ++F) {
        if (boundary_only && !mesh_.is_boundary(F))
            continue;
        auto block = m_block(out, F);
        for (std::size_t q = 0; q < face_rule_.size(); ++q)
            block += (face_rule_.weights[q] * f(face_point(mesh_, F, face_rule_.points[q].x()))) *
                     face_basis_table_.col(q);
    }
    return out;
}

Eigen::VectorXd HdgSpace::project_elements(const ScalarField& f) const
{
    Eigen::VectorXd rhs = load(f);
    for (int K = 0; K < mesh_.num_elements(); ++K)
        u_block(rhs, K) = matrices_[K].mass.llt().solve(Eigen::VectorXd(u_block(rhs, K)));
    return rhs;
}

double HdgSpace::eval_u(const Eigen::VectorXd& u, int K, const Point& x) const
{
    return basis_.values(geometry_[K].to_reference(x)).dot(u_block(u, K));
}

Point HdgSpace::eval_q(const Eigen::VectorXd& q, int K, const Point& x) const
{
    const Eigen::VectorXd phi = basis_.values(geometry_[K].to_reference(x));
    Point out = Point::Zero();
    const auto block = q_block(q, K);
    for (int c = 0; c < dim(); ++c)
        out[c] = phi.dot(block.segment(c * n_w(), n_w()));
    return out;
}

Eigen::VectorXd local_divergence(const HdgSpace& space, const HDGState& x, int K)
{
    const ElementMatrices& em = space.matrices(K);
    const SimplicialMesh& mesh = space.mesh();
    Eigen::VectorXd r = em.div * space.q_block(x.q, K) + em.tau_uu * space.u_block(x.u, K);
    for (int i = 0; i < space.faces_per_element(); ++i)
        r -= em.tau_ul[i] * space.m_block(x.uhat, mesh.element_face(K, i));
    return r;
}

Eigen::VectorXd local_flux(const HdgSpace& space, const HDGState& x, int K, int i)
{
    const ElementMatrices& em = space.matrices(K);
    const int F = space.mesh().element_face(K, i);
    return em.normal[i].transpose() * space.q_block(x.q, K) + em.tau_ul[i].transpose() * space.u_block(x.u, K) -
           em.tau_ll[i] * space.m_block(x.uhat, F);
}

CondensedSystem::CondensedSystem(const HdgSpace& space, double sigma, double c0)
    : space_(&space), sigma_(sigma), c0_(c0)
{
    if (!(sigma >= 0.0) || !(c0 > 0.0))
        throw std::invalid_argument("condensed system needs sigma >= 0 and c0 > 0");
    const SimplicialMesh& mesh = space.mesh();
    const int nw = space.n_w(), nv = space.n_v(), nm = space.n_m(), nf = space.faces_per_element();
    const int nl = nv + nw;
    const double s = sigma / c0;

    interior_index_.assign(mesh.num_faces(), -1);
    int n_int = 0;
    for (int F = 0; F < mesh.num_faces(); ++F)
        if (!mesh.is_boundary(F))
            interior_index_[F] = n_int++;

    std::vector<Eigen::Triplet<double>> triplets;
    local_.resize(mesh.num_elements());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const ElementMatrices& em = space.matrices(K);
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nl, nl);
        for (int c = 0; c < space.dim(); ++c)
            L.block(c * nw, c * nw, nw, nw) = em.mass;
        L.block(0, nv, nv, nw) = -em.div.transpose();
        L.block(nv, 0, nw, nv) = em.div;
        L.block(nv, nv, nw, nw) = s * em.mass + em.tau_uu;

        Eigen::MatrixXd trace_rhs(nl, nf * nm);
        Eigen::MatrixXd flux_op(nf * nm, nl);
        Eigen::MatrixXd tll = Eigen::MatrixXd::Zero(nf * nm, nf * nm);
        for (int i = 0; i < nf; ++i) {
            trace_rhs.block(0, i * nm, nv, nm) = -em.normal[i];
            trace_rhs.block(nv, i * nm, nw, nm) = em.tau_ul[i];
            flux_op.block(i * nm, 0, nm, nv) = em.normal[i].transpose();
            flux_op.block(i * nm, nv, nm, nw) = em.tau_ul[i].transpose();
            tll.block(i * nm, i * nm, nm, nm) = em.tau_ll[i];
        }

        LocalOperator& lo = local_[K];
        lo.lu.compute(L);
        const double rcond = lo.lu.rcond();
        // the estimate can miss a roundoff-sized pivot, so check the pivots too
        const double pivot_ratio =
            lo.lu.matrixLU().diagonal().cwiseAbs().minCoeff() / L.cwiseAbs().maxCoeff();
        if (!(rcond > 1e-14) || !(pivot_ratio > 1e-12)) {
            std::ostringstream os;
            os << "local HDG system of element " << K << " is singular (rcond " << rcond << ", sigma " << sigma
               << ", tau " << space.stabilization().describe() << ")";
            throw ConfigurationError(os.str());
        }
        Eigen::MatrixXd load_rhs = Eigen::MatrixXd::Zero(nl, nw);
        load_rhs.bottomRows(nw).setIdentity();
        lo.trace_map = lo.lu.solve(trace_rhs);
        lo.load_map = lo.lu.solve(load_rhs);
        lo.flux_of_load = flux_op * lo.load_map;
        lo.condensed = -(flux_op * lo.trace_map - tll);

        for (int i = 0; i < nf; ++i) {
            const int ri = interior_index_[mesh.element_face(K, i)];
            if (ri < 0)
                continue;
            for (int j = 0; j < nf; ++j) {
                const int rj = interior_index_[mesh.element_face(K, j)];
                if (rj < 0)
                    continue;
                for (int a = 0; a < nm; ++a)
                    for (int b = 0; b < nm; ++b)
                        triplets.emplace_back(ri * nm + a, rj * nm + b, lo.condensed(i * nm + a, j * nm + b));
            }
        }
    }

    matrix_.resize(n_int * nm, n_int * nm);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    if (n_int > 0) {
        factor_.compute(matrix_);
        if (factor_.info() != Eigen::Success) {
            std::ostringstream os;
            os << "condensed trace system is not positive definite (sigma " << sigma << ", c0 " << c0 << ", tau "
               << space.stabilization().describe() << ", " << mesh.num_elements() << " elements)";
            throw ConfigurationError(os.str());
        }
    }
}

HDGState CondensedSystem::solve(const StepData& data) const
{
    const HdgSpace& space = *space_;
    const SimplicialMesh& mesh = space.mesh();
    const int nw = space.n_w(), nv = space.n_v(), nm = space.n_m(), nf = space.faces_per_element();
    ++solves_;

    // scaled W-loads and the element face-flux right-hand sides
    std::vector<Eigen::VectorXd> loads(mesh.num_elements());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(matrix_.rows());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        Eigen::VectorXd rb = space.u_block(data.u_load, K);
        if (data.history)
            rb -= local_divergence(space, *data.history, K);
        rb /= c0_;
        Eigen::VectorXd z = local_[K].flux_of_load * rb;
        if (data.history)
            for (int i = 0; i < nf; ++i)
                z.segment(i * nm, nm) += local_flux(space, *data.history, K, i) / c0_;
        for (int i = 0; i < nf; ++i) {
            const int ri = interior_index_[mesh.element_face(K, i)];
            if (ri < 0)
                continue;
            rhs.segment(ri * nm, nm) += z.segment(i * nm, nm);
            for (int j = 0; j < nf; ++j) {
                const int Fj = mesh.element_face(K, j);
                if (interior_index_[Fj] >= 0)
                    continue;
                rhs.segment(ri * nm, nm) -=
                    local_[K].condensed.block(i * nm, j * nm, nm, nm) * data.dirichlet.segment(Fj * nm, nm);
            }
        }
        loads[K] = std::move(rb);
    }

    HDGState x = space.zero_state();
    if (matrix_.rows() > 0) {
        const Eigen::VectorXd traces = factor_.solve(rhs);
        for (int F = 0; F < mesh.num_faces(); ++F)
            if (interior_index_[F] >= 0)
                space.m_block(x.uhat, F) = traces.segment(interior_index_[F] * nm, nm);
    }
    for (int F = 0; F < mesh.num_faces(); ++F)
        if (interior_index_[F] < 0)
            space.m_block(x.uhat, F) = data.dirichlet.segment(F * nm, nm);

    Eigen::VectorXd lam(nf * nm);
    for (int K = 0; K < mesh.num_elements(); ++K) {
        for (int i = 0; i < nf; ++i)
            lam.segment(i * nm, nm) = space.m_block(x.uhat, mesh.element_face(K, i));
        const Eigen::VectorXd local = local_[K].trace_map * lam + local_[K].load_map * loads[K];
        space.q_block(x.q, K) = local.head(nv);
        space.u_block(x.u, K) = local.tail(nw);
    }
    return x;
}

double Residuals::max_relative() const
{
    return std::max({flux_eq, balance_eq, dirichlet, transmission}) / scale;
}

Residuals evaluate_residuals(const HdgSpace& space, const HDGState& x, double sigma, double c0,
                             const StepData& data)
{
    const SimplicialMesh& mesh = space.mesh();
    const int nw = space.n_w(), nm = space.n_m(), nf = space.faces_per_element();
    Residuals r;
    r.scale = 1.0 + std::max({data.u_load.lpNorm<Eigen::Infinity>(), x.u.lpNorm<Eigen::Infinity>(),
                              x.q.lpNorm<Eigen::Infinity>(), x.uhat.lpNorm<Eigen::Infinity>()});

    Eigen::VectorXd trans = Eigen::VectorXd::Zero(mesh.num_faces() * nm);
    Eigen::VectorXd jump = Eigen::VectorXd::Zero(mesh.num_faces() * nm);
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const ElementMatrices& em = space.matrices(K);
        Eigen::VectorXd ra(space.n_v());
        for (int c = 0; c < space.dim(); ++c)
            ra.segment(c * nw, nw) = em.mass * space.q_block(x.q, K).segment(c * nw, nw);
        ra -= em.div.transpose() * space.u_block(x.u, K);
        for (int i = 0; i < nf; ++i)
            ra += em.normal[i] * space.m_block(x.uhat, mesh.element_face(K, i));
        r.flux_eq = std::max(r.flux_eq, ra.lpNorm<Eigen::Infinity>());

        Eigen::VectorXd rb = sigma * em.mass * space.u_block(x.u, K) + c0 * local_divergence(space, x, K) -
                             space.u_block(data.u_load, K);
        if (data.history)
            rb += local_divergence(space, *data.history, K);
        r.balance_eq = std::max(r.balance_eq, rb.lpNorm<Eigen::Infinity>());

        for (int i = 0; i < nf; ++i) {
            const int F = mesh.element_face(K, i);
            const Eigen::VectorXd phi = local_flux(space, x, K, i);
            jump.segment(F * nm, nm) += phi;
            trans.segment(F * nm, nm) += c0 * phi;
            if (data.history)
                trans.segment(F * nm, nm) += local_flux(space, *data.history, K, i);
        }
    }
    for (int F = 0; F < mesh.num_faces(); ++F) {
        if (mesh.is_boundary(F)) {
            const double d = mesh.face_measure(F) *
                             (space.m_block(x.uhat, F) - data.dirichlet.segment(F * nm, nm)).lpNorm<Eigen::Infinity>();
            r.dirichlet = std::max(r.dirichlet, d);
        } else {
            r.transmission = std::max(r.transmission, trans.segment(F * nm, nm).lpNorm<Eigen::Infinity>() / c0);
            r.jump = std::max(r.jump, jump.segment(F * nm, nm).lpNorm<Eigen::Infinity>());
        }
    }
    return r;
}

StepData make_step_data(const HdgSpace& space, const SteadyProblem& problem)
{
    StepData data;
    data.u_load = problem.source ? space.load(problem.source)
                                 : Eigen::VectorXd::Zero(space.mesh().num_elements() * space.n_w());
    if (problem.previous_u) {
        for (int K = 0; K < space.mesh().num_elements(); ++K)
            space.u_block(data.u_load, K) +=
                problem.sigma * space.matrices(K).mass * space.u_block(*problem.previous_u, K);
    }
    data.history = problem.history;
    data.dirichlet = problem.dirichlet ? space.project_faces(problem.dirichlet, true)
                                       : Eigen::VectorXd::Zero(space.mesh().num_faces() * space.n_m());
    return data;
}

HDGState solve_steady(const HdgSpace& space, const SteadyProblem& problem)
{
    if (problem.sigma == 0.0 && space.mesh().boundary_faces().empty())
        throw std::invalid_argument("solve_steady: sigma = 0 needs at least one Dirichlet face");
    const CondensedSystem system(space, problem.sigma, problem.c0);
    return system.solve(make_step_data(space, problem));
}

std::vector<Eigen::VectorXd> numerical_trace(const HdgSpace& space, const HDGState& state, int K)
{
    const SimplicialMesh& mesh = space.mesh();
    const ElementMatrices& em = space.matrices(K);
    const int nw = space.n_w();
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < space.faces_per_element(); ++i) {
        const Eigen::MatrixXd T = space.face_table(K, i);
        const auto qb = space.q_block(state.q, K);
        Eigen::VectorXd qn = Eigen::VectorXd::Zero(T.cols());
        for (int c = 0; c < space.dim(); ++c)
            qn += em.normals[i][c] * (T.transpose() * qb.segment(c * nw, nw));
        const Eigen::VectorXd u = T.transpose() * space.u_block(state.u, K);
        const Eigen::VectorXd lam =
            space.face_basis_table().transpose() * space.m_block(state.uhat, mesh.element_face(K, i));
        out.push_back(qn + em.tau[i] * (u - lam));
    }
    return out;
}

namespace {

// Rule for smooth-data element integrals in errors and projections.
QuadratureRule accurate_rule(const HdgSpace& space)
{
    return simplex_rule(space.dim(), 2 * space.degree() + 8);
}

} // namespace

double l2_error_u(const HdgSpace& space, const Eigen::VectorXd& u, const ScalarField& exact)
{
    const QuadratureRule rule = accurate_rule(space);
    double sum = 0.0;
    for (int K = 0; K < space.mesh().num_elements(); ++K) {
        const ElementGeometry& geo = space.geometry(K);
        const auto block = space.u_block(u, K);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double e = space.basis().values(rule.points[q]).dot(block) - exact(geo.to_physical(rule.points[q]));
            sum += rule.weights[q] * geo.det * e * e;
        }
    }
    return std::sqrt(sum);
}

double l2_error_q(const HdgSpace& space, const Eigen::VectorXd& q, const VectorField& exact)
{
    const QuadratureRule rule = accurate_rule(space);
    const int nw = space.n_w();
    double sum = 0.0;
    for (int K = 0; K < space.mesh().num_elements(); ++K) {
        const ElementGeometry& geo = space.geometry(K);
        const auto block = space.q_block(q, K);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            const Eigen::VectorXd phi = space.basis().values(rule.points[p]);
            const Point ex = exact(geo.to_physical(rule.points[p]));
            for (int c = 0; c < space.dim(); ++c) {
                const double e = phi.dot(block.segment(c * nw, nw)) - ex[c];
                sum += rule.weights[p] * geo.det * e * e;
            }
        }
    }
    return std::sqrt(sum);
}

} // namespace fhdg
