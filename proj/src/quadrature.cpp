#include "fhdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fhdg {

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one point");
    // Jacobi matrix of the Legendre recurrence on [-1, 1]
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    rule.dim = 1;
    rule.degree = 2 * n - 1;
    for (int i = 0; i < n; ++i) {
        const double x = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.points.emplace_back(0.5 * (x + 1.0), 0.0);
        rule.weights.push_back(v0 * v0); // 2 v0^2 on [-1,1], halved on [0,1]
    }
    return rule;
}

double reference_measure(int dim)
{
    switch (dim) {
    case 0:
    case 1:
        return 1.0;
    case 2:
        return 0.5;
    default:
        throw std::invalid_argument("reference_measure: unsupported dimension");
    }
}

QuadratureRule simplex_rule(int dim, int degree)
{
    if (degree < 0)
        throw std::invalid_argument("simplex_rule: negative degree");
    if (dim == 0) {
        QuadratureRule rule;
        rule.dim = 0;
        rule.degree = degree;
        rule.points.emplace_back(0.0, 0.0);
        rule.weights.push_back(1.0);
        return rule;
    }
    if (dim == 1) {
        QuadratureRule rule = gauss_legendre(degree / 2 + 1);
        return rule;
    }
    if (dim != 2)
        throw std::invalid_argument("simplex_rule: unsupported dimension");

    // (x, y) = (u, v (1 - u)), Jacobian (1 - u): one extra degree in u
    const QuadratureRule gu = gauss_legendre((degree + 1) / 2 + 1);
    const QuadratureRule gv = gauss_legendre(degree / 2 + 1);
    QuadratureRule rule;
    rule.dim = 2;
    rule.degree = degree;
    for (std::size_t i = 0; i < gu.size(); ++i) {
        const double u = gu.points[i].x();
        for (std::size_t j = 0; j < gv.size(); ++j) {
            const double v = gv.points[j].x();
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

} // namespace fhdg
