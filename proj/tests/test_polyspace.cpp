#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fhdg/basis.hpp"
#include "fhdg/quadrature.hpp"

using namespace fhdg;

namespace {

constexpr double pi = std::numbers::pi;

double factorial(int n)
{
    return n <= 1 ? 1.0 : n * factorial(n - 1);
}

} // namespace

TEST_SUITE("polyspace")
{
    TEST_CASE("quadrature weights and exactness")
    {
        for (int deg = 0; deg <= 12; ++deg) {
            const QuadratureRule r1 = simplex_rule(1, deg);
            double s = 0.0;
            for (double w : r1.weights)
                s += w;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
            for (int a = 0; a <= deg; ++a) {
                double v = 0.0;
                for (std::size_t q = 0; q < r1.size(); ++q)
                    v += r1.weights[q] * std::pow(r1.points[q].x(), a);
                CHECK(std::abs(v - 1.0 / (a + 1)) <= 1e-13);
            }
            const QuadratureRule r2 = simplex_rule(2, deg);
            s = 0.0;
            for (double w : r2.weights)
                s += w;
            CHECK(s == doctest::Approx(reference_measure(2)).epsilon(1e-14));
            for (int a = 0; a <= deg; ++a)
                for (int b = 0; a + b <= deg; ++b) {
                    double v = 0.0;
                    for (std::size_t q = 0; q < r2.size(); ++q)
                        v += r2.weights[q] * std::pow(r2.points[q].x(), a) * std::pow(r2.points[q].y(), b);
                    // int x^a y^b over the reference triangle = a! b! / (a + b + 2)!
                    CHECK(std::abs(v - factorial(a) * factorial(b) / factorial(a + b + 2)) <= 1e-13);
                }
        }
    }

    TEST_CASE("dimensions")
    {
        CHECK(ElementBasis(1, 3).size() == 4);
        CHECK(ElementBasis(2, 2).size() == 6);
        CHECK(FaceBasis(2, 2).size() == 3);
        CHECK(FaceBasis(1, 2).size() == 1);
        CHECK(dim_polynomials(-1, 2) == 0);
    }

    TEST_CASE("local mass examples")
    {
        const SimplicialMesh unit = build_interval_mesh(0.0, 1.0, 1);
        CHECK(local_mass(unit, 0, ElementBasis(1, 0))(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        const Eigen::MatrixXd M = local_mass(unit, 0, ElementBasis(1, 1, ElementBasis::Kind::monomial));
        CHECK(M(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(M(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(M(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(M(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

        const SimplicialMesh tri(2, {Point(0, 0), Point(1, 0), Point(0, 1)}, {0, 1, 2});
        CHECK(local_mass(tri, 0, ElementBasis(2, 0, ElementBasis::Kind::monomial))(0, 0) ==
              doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("mass matrices are symmetric positive definite")
    {
        const SimplicialMesh m = build_unit_square_mesh(2);
        for (int k = 0; k <= 3; ++k)
            for (int K = 0; K < m.num_elements(); ++K) {
                const Eigen::MatrixXd M = local_mass(m, K, ElementBasis(2, k));
                CHECK((M - M.transpose()).norm() <= 1e-14);
                CHECK(M.llt().info() == Eigen::Success);
            }
    }

    TEST_CASE("gradients match finite differences")
    {
        for (int dim : {1, 2}) {
            const ElementBasis b(dim, 3);
            const Point x(0.23, dim == 2 ? 0.31 : 0.0);
            const Eigen::MatrixXd g = b.gradients(x);
            const double eps = 1e-6;
            for (int c = 0; c < dim; ++c) {
                Point e = Point::Zero();
                e[c] = eps;
                const Eigen::VectorXd fd = (b.values(x + e) - b.values(x - e)) / (2 * eps);
                CHECK((fd - g.col(c)).lpNorm<Eigen::Infinity>() <= 1e-6);
            }
        }
    }

    TEST_CASE("gradmass and face coupling against the divergence theorem")
    {
        // (phi_i, d_c phi_j) + (d_c phi_i, phi_j) = <phi_i phi_j, n_c>_{dK}
        const SimplicialMesh m = build_unit_square_mesh(2);
        const ElementBasis b(2, 2);
        const FaceBasis fb(2, 2);
        for (int K = 0; K < m.num_elements(); ++K) {
            const auto G = local_gradmass(m, K, b);
            for (int c = 0; c < 2; ++c) {
                Eigen::MatrixXd boundary = Eigen::MatrixXd::Zero(b.size(), b.size());
                const QuadratureRule r = simplex_rule(1, 2 * b.degree());
                for (int i = 0; i < 3; ++i) {
                    const double len = m.face_measure(m.element_face(K, i));
                    const double n = m.outward_normal(K, i)[c];
                    for (std::size_t q = 0; q < r.size(); ++q) {
                        const Eigen::VectorXd phi = b.values(face_point_on_reference(m, K, i, r.points[q].x()));
                        boundary += r.weights[q] * len * n * phi * phi.transpose();
                    }
                }
                CHECK((G[c] + G[c].transpose() - boundary).norm() <= 1e-12);
            }
            // the constant face mode pairs with the constant element mode
            const Eigen::MatrixXd E = face_coupling(m, K, 0, b, fb);
            CHECK(E.rows() == b.size());
            CHECK(E.cols() == fb.size());
        }
    }

    TEST_CASE("face basis agrees from both sides")
    {
        const SimplicialMesh m = build_unit_square_mesh(2);
        const ElementBasis b(2, 1, ElementBasis::Kind::monomial);
        const FaceBasis fb(2, 2);
        for (int F : m.interior_faces()) {
            const auto& fe = m.face_elements(F);
            const Eigen::MatrixXd E0 = face_coupling(m, fe[0][0], fe[0][1], b, fb);
            const Eigen::MatrixXd E1 = face_coupling(m, fe[1][0], fe[1][1], b, fb);
            // a globally linear function: its coefficients differ per element,
            // but its pairing with each face mode must agree
            const auto coeffs = [&](int K) {
                const ElementGeometry g(m, K);
                // monomial basis 1, xi, eta; f = 1 + 2x - y
                Eigen::Vector3d c;
                const Point o = g.origin;
                c << 1.0 + 2.0 * o.x() - o.y(), 2.0 * g.jacobian(0, 0) - g.jacobian(1, 0),
                    2.0 * g.jacobian(0, 1) - g.jacobian(1, 1);
                return c;
            };
            const Eigen::VectorXd p0 = E0.transpose() * coeffs(fe[0][0]);
            const Eigen::VectorXd p1 = E1.transpose() * coeffs(fe[1][0]);
            CHECK((p0 - p1).norm() <= 1e-13);
        }
    }

    TEST_CASE("element projections")
    {
        const SimplicialMesh unit = build_interval_mesh(0.0, 1.0, 1);
        const ElementBasis p0(1, 0, ElementBasis::Kind::monomial);
        const Eigen::VectorXd c0 = l2_project_element([](const Point& x) { return x.x() * x.x(); }, unit, 0, p0);
        CHECK(c0(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

        // best L2 line for sin(pi x) on [0, 1]: normal equations give 2/pi + 0 x
        const ElementBasis p1(1, 1, ElementBasis::Kind::monomial);
        const Eigen::VectorXd c1 = l2_project_element([](const Point& x) { return std::sin(pi * x.x()); }, unit, 0, p1, 24);
        Eigen::Matrix2d gram;
        gram << 1.0, 0.5, 0.5, 1.0 / 3.0;
        const Eigen::Vector2d rhs(2.0 / pi, 1.0 / pi);
        const Eigen::Vector2d dense = gram.fullPivLu().solve(rhs);
        CHECK((c1 - dense).norm() <= 1e-12);

        // reproduction of P_k
        const SimplicialMesh m = build_unit_square_mesh(2);
        const ElementBasis b(2, 2);
        const auto f = [](const Point& x) { return 1.0 - x.x() + 3.0 * x.x() * x.y() - x.y() * x.y(); };
        for (int K = 0; K < m.num_elements(); ++K) {
            const Eigen::VectorXd c = l2_project_element(f, m, K, b);
            for (const Point& p : {Point(0.1, 0.2), Point(0.3, 0.5)}) {
                const ElementGeometry g(m, K);
                const Point x = g.to_physical(p);
                CHECK(std::abs(evaluate(m, K, b, c, x) - f(x)) <= 1e-13);
            }
        }
    }

    TEST_CASE("face projection reproduces P_k and is orthogonal")
    {
        const SimplicialMesh m = build_unit_square_mesh(2);
        const FaceBasis fb(2, 2);
        const auto f = [](const Point& x) { return 2.0 + x.x() * x.y() - x.y(); };
        for (int F = 0; F < m.num_faces(); ++F) {
            const Eigen::VectorXd c = l2_project_face(f, m, F, fb);
            for (double s : {0.0, 0.4, 1.0})
                CHECK(std::abs(c.dot(fb.values(s)) - f(face_point(m, F, s))) <= 1e-13);
        }
        const auto g = [](const Point& x) { return std::exp(x.x() + x.y()); };
        const FaceBasis fb1(2, 1);
        const int F = 3;
        const Eigen::VectorXd c = l2_project_face(g, m, F, fb1, 20);
        const QuadratureRule r = simplex_rule(1, 14);
        Eigen::VectorXd resid = Eigen::VectorXd::Zero(fb1.size());
        for (std::size_t q = 0; q < r.size(); ++q) {
            const double s = r.points[q].x();
            resid += r.weights[q] * (g(face_point(m, F, s)) - c.dot(fb1.values(s))) * fb1.values(s);
        }
        CHECK(resid.norm() <= 1e-13);
    }

    TEST_CASE("projection error decay")
    {
        for (int k = 0; k <= 2; ++k) {
            double previous = 0.0;
            double slope = 0.0;
            for (int n : {4, 8, 16}) {
                const SimplicialMesh m = build_interval_mesh(0.0, 1.0, n);
                const ElementBasis b(1, k);
                const QuadratureRule r = simplex_rule(1, 2 * k + 10);
                double err = 0.0;
                for (int K = 0; K < m.num_elements(); ++K) {
                    const auto f = [](const Point& x) { return std::sin(pi * x.x()); };
                    const Eigen::VectorXd c = l2_project_element(f, m, K, b);
                    const ElementGeometry g(m, K);
                    for (std::size_t q = 0; q < r.size(); ++q) {
                        const double e = b.values(r.points[q]).dot(c) - f(g.to_physical(r.points[q]));
                        err += r.weights[q] * g.det * e * e;
                    }
                }
                err = std::sqrt(err);
                if (previous > 0.0)
                    slope = std::log2(previous / err);
                previous = err;
            }
            CHECK(slope >= k + 0.9);
        }
    }
}
