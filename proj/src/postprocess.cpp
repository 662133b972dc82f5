#include "fhdg/postprocess.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fhdg {

namespace {

// Jacobian entries rounded relative to the element size.
std::array<long long, 4> shape_key(const ElementGeometry& geo, int dim, double h)
{
    std::array<long long, 4> key{0, 0, 0, 0};
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            key[2 * a + b] = std::llround(geo.jacobian(a, b) / h * 1e9);
    return key;
}

} // namespace

Postprocessor::Postprocessor(const HdgSpace& space)
    : space_(&space),
      basis_(space.dim(), space.degree() + 1),
      rule_(simplex_rule(space.dim(), 2 * space.degree() + 4))
{
    const SimplicialMesh& mesh = space.mesh();
    std::map<std::pair<std::array<long long, 4>, long long>, int> lookup;
    class_of_.resize(mesh.num_elements());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const double h = mesh.element_diameter(K);
        const auto key = std::make_pair(shape_key(space.geometry(K), space.dim(), h), std::llround(std::log2(h) * 1e9));
        auto [it, inserted] = lookup.emplace(key, static_cast<int>(classes_.size()));
        if (inserted)
            classes_.push_back(assemble(K));
        class_of_[K] = it->second;
    }
}

PostprocessClass Postprocessor::assemble(int K) const
{
    const HdgSpace& space = *space_;
    const int d = space.dim(), np = basis_.size(), nw = space.n_w();
    const ElementGeometry& geo = space.geometry(K);
    const Eigen::MatrixXd jinv = geo.inverse.topLeftCorner(d, d);

    PostprocessClass pc;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(np, np);
    pc.grad_pairing = Eigen::MatrixXd::Zero(np, d * nw);
    pc.star_mean = Eigen::VectorXd::Zero(np);
    pc.w_mean = Eigen::VectorXd::Zero(nw);
    for (std::size_t p = 0; p < rule_.size(); ++p) {
        const double w = rule_.weights[p] * geo.det;
        const Eigen::MatrixXd grad = basis_.gradients(rule_.points[p]) * jinv;
        const Eigen::VectorXd psi = basis_.values(rule_.points[p]);
        const Eigen::VectorXd phi = space.basis().values(rule_.points[p]);
        S += w * grad * grad.transpose();
        for (int c = 0; c < d; ++c)
            pc.grad_pairing.middleCols(c * nw, nw) += w * grad.col(c) * phi.transpose();
        pc.star_mean += w * psi;
        pc.w_mean += w * phi;
    }
    pc.system = Eigen::MatrixXd::Zero(np + 1, np + 1);
    pc.system.topLeftCorner(np, np) = S;
    pc.system.block(0, np, np, 1) = pc.star_mean;
    pc.system.block(np, 0, 1, np) = pc.star_mean.transpose();
    pc.lu.compute(pc.system);
    return pc;
}

Eigen::VectorXd Postprocessor::element(const Eigen::VectorXd& u, const Eigen::VectorXd& q, int K) const
{
    const PostprocessClass& pc = class_data(K);
    const int np = basis_.size();
    Eigen::VectorXd rhs(np + 1);
    rhs.head(np) = -pc.grad_pairing * space_->q_block(q, K);
    rhs(np) = pc.w_mean.dot(space_->u_block(u, K));
    return pc.lu.solve(rhs).head(np);
}

PostState Postprocessor::apply(const HDGState& state) const
{
    PostState s;
    s.degree = basis_.degree();
    s.per_element = basis_.size();
    const int ne = space_->mesh().num_elements();
    s.coeffs.resize(static_cast<Eigen::Index>(ne) * s.per_element);
    for (int K = 0; K < ne; ++K)
        s.coeffs.segment(K * s.per_element, s.per_element) = element(state.u, state.q, K);
    return s;
}

double Postprocessor::eval(const PostState& s, int K, const Point& x) const
{
    return basis_.values(space_->geometry(K).to_reference(x)).dot(s.block(K));
}

double Postprocessor::l2_error(const PostState& s, const ScalarField& exact) const
{
    const QuadratureRule rule = simplex_rule(space_->dim(), 2 * basis_.degree() + 8);
    double sum = 0.0;
    for (int K = 0; K < space_->mesh().num_elements(); ++K) {
        const ElementGeometry& geo = space_->geometry(K);
        const auto block = s.block(K);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            const double e = basis_.values(rule.points[p]).dot(block) - exact(geo.to_physical(rule.points[p]));
            sum += rule.weights[p] * geo.det * e * e;
        }
    }
    return std::sqrt(sum);
}

std::pair<double, double> Postprocessor::residuals(const PostState& s, const HDGState& state, int K) const
{
    const PostprocessClass pc = assemble(K);
    const int np = basis_.size();
    const Eigen::VectorXd c = s.block(K);
    const Eigen::VectorXd stiff =
        pc.system.topLeftCorner(np, np) * c + pc.grad_pairing * space_->q_block(state.q, K);
    const double mean = pc.star_mean.dot(c) - pc.w_mean.dot(space_->u_block(state.u, K));
    return {stiff.lpNorm<Eigen::Infinity>(), std::abs(mean)};
}

Eigen::VectorXd postprocess_element(const HdgSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& q,
                                    int K)
{
    const Postprocessor post(space);
    const PostprocessClass pc = post.assemble(K);
    const int np = post.basis().size();
    Eigen::VectorXd rhs(np + 1);
    rhs.head(np) = -pc.grad_pairing * space.q_block(q, K);
    rhs(np) = pc.w_mean.dot(space.u_block(u, K));
    return pc.lu.solve(rhs).head(np);
}

KappaResult compute_kappa(double alpha, double final_time, double rho, double c_kd)
{
    if (!(alpha > -1.0 && alpha <= 0.0))
        throw std::domain_error("compute_kappa: alpha must lie in (-1, 0]");
    if (!(rho > 0.0) || !(final_time > 0.0) || !(c_kd > 0.0))
        throw std::domain_error("compute_kappa: rho, T and C_kd must be positive");
    const double a1 = alpha + 1.0;
    const double log_rhs = 2.0 * std::log(c_kd) + a1 * std::log(final_time) - 2.0 * std::log(rho);

    // y = log kappa solves a1 y + log y = log_rhs; the left side increases on y > 0
    auto f = [&](double y) { return a1 * y + std::log(y) - log_rhs; };
    double lo = std::numeric_limits<double>::min(), hi = 1.0;
    while (f(hi) < 0.0)
        hi *= 2.0;
    double y = 0.5 * (lo + hi);
    if (f(1.0) >= 0.0) {
        hi = 1.0;
        y = std::exp(log_rhs);  // a1 y is small next to log y here
        if (!(y > lo && y < hi))
            y = 0.5 * hi;
    } else {
        lo = 1.0;
        y = std::max(1.0, log_rhs / a1);
        if (!(y > lo && y < hi))
            y = 0.5 * (lo + hi);
    }
    for (int it = 0; it < 200; ++it) {
        const double fy = f(y);
        if (fy > 0.0)
            hi = y;
        else
            lo = y;
        if (std::abs(fy) <= 1e-15 * std::max(1.0, std::abs(log_rhs)))
            break;
        double next = y - fy / (a1 + 1.0 / y);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == y)
            break;
        y = next;
    }

    KappaResult r;
    r.residual = std::abs(f(y));
    r.kappa = std::exp(y);
    if (y < 1.0 - 1e-12) {
        r.kappa = std::exp(1.0);
        r.clamped = true;
    }
    return r;
}

} // namespace fhdg
