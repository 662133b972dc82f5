#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fhdg/hdg.hpp"
#include "oracles.hpp"

using namespace fhdg;

namespace {

constexpr double pi = std::numbers::pi;

// Square split into four triangles around its center.
SimplicialMesh four_triangles()
{
    return SimplicialMesh(2, {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1), Point(0.5, 0.5)},
                          {0, 1, 4, 1, 2, 4, 2, 3, 4, 3, 0, 4});
}

double max_diff(const HDGState& a, const HDGState& b)
{
    return std::max({(a.u - b.u).lpNorm<Eigen::Infinity>(), (a.q - b.q).lpNorm<Eigen::Infinity>(),
                     (a.uhat - b.uhat).lpNorm<Eigen::Infinity>()});
}

} // namespace

TEST_SUITE("hdg")
{
    TEST_CASE("quadratic solution is reproduced for every tau")
    {
        for (double t : {0.1, 1.0, 10.0}) {
            const HdgSpace space(build_interval_mesh(0.0, 1.0, 5), 2, Stabilization::constant(t));
            SteadyProblem p;
            p.sigma = 0.0;
            p.c0 = 1.0;
            p.source = [](const Point&) { return 2.0; };
            p.dirichlet = [](const Point&) { return 0.0; };
            const HDGState x = solve_steady(space, p);
            CHECK(l2_error_u(space, x.u, [](const Point& y) { return y.x() * (1.0 - y.x()); }) <= 1e-11);
            CHECK(l2_error_q(space, x.q, [](const Point& y) { return Point(2.0 * y.x() - 1.0, 0.0); }) <= 1e-11);
        }
    }

    TEST_CASE("constants are harmonic")
    {
        for (const SimplicialMesh& m : {build_interval_mesh(0.0, 1.0, 4), build_unit_square_mesh(3)}) {
            const HdgSpace space(m, 1);
            SteadyProblem p;
            p.dirichlet = [](const Point&) { return 1.0; };
            const HDGState x = solve_steady(space, p);
            CHECK(l2_error_u(space, x.u, [](const Point&) { return 1.0; }) <= 1e-12);
            CHECK(x.q.lpNorm<Eigen::Infinity>() <= 1e-12);
            const Eigen::VectorXd ones = space.project_faces([](const Point&) { return 1.0; });
            CHECK((x.uhat - ones).lpNorm<Eigen::Infinity>() <= 1e-12);
        }
    }

    TEST_CASE("single element, k = 0, against the hand-assembled system")
    {
        // unknowns (u, q, uhat_0, uhat_1):  q - uhat_0 + uhat_1 = 0,
        // 3u - uhat_0 - uhat_1 = 1, uhat_0 = uhat_1 = 0
        Eigen::Matrix4d A;
        A << 0, 1, -1, 1, 3, 0, -1, -1, 0, 0, 1, 0, 0, 0, 0, 1;
        const Eigen::Vector4d ref = A.fullPivLu().solve(Eigen::Vector4d(0, 1, 0, 0));

        const HdgSpace space(build_interval_mesh(0.0, 1.0, 1), 0);
        SteadyProblem p;
        p.sigma = 1.0;
        p.c0 = 1.0;
        p.source = [](const Point&) { return 1.0; };
        const HDGState x = solve_steady(space, p);
        CHECK(x.u(0) == doctest::Approx(ref(0)).epsilon(1e-14));
        CHECK(std::abs(x.q(0) - ref(1)) <= 1e-14);
        CHECK(x.uhat.lpNorm<Eigen::Infinity>() <= 1e-15);
        CHECK(ref(0) == doctest::Approx(1.0 / 3.0));

        const HDGState o = oracle::monolithic_solve(space.mesh(), 0, Stabilization::constant(1.0), 1.0, 1.0,
                                                    p.source, nullptr, nullptr);
        CHECK(max_diff(x, o) <= 1e-14);
    }

    TEST_CASE("condensed solve equals the monolithic solve")
    {
        // polynomial data keeps both assemblies exact
        const ScalarField f = [](const Point& x) { return 1.0 + x.x() * x.x() - x.x() * x.y(); };
        const ScalarField g = [](const Point& x) { return 1.0 + x.x() - 0.5 * x.y(); };
        const std::vector<SimplicialMesh> meshes{build_interval_mesh(0.0, 1.0, 1), build_interval_mesh(0.0, 1.0, 4),
                                                 build_unit_square_mesh(1), four_triangles()};
        for (const SimplicialMesh& m : meshes)
            for (int k : {0, 1})
                for (const Stabilization& tau : {Stabilization::constant(1.0), Stabilization::constant(3.7),
                                                 Stabilization::single_face(0)})
                    for (auto [sigma, c0] : {std::pair{0.0, 1.0}, std::pair{2.5, 0.8}}) {
                        const HdgSpace space(m, k, tau);
                        const Eigen::VectorXd prev = space.project_elements([](const Point& x) { return x.x(); });
                        SteadyProblem p;
                        p.sigma = sigma;
                        p.c0 = c0;
                        p.source = f;
                        p.dirichlet = g;
                        if (sigma > 0.0)
                            p.previous_u = prev;
                        const HDGState x = solve_steady(space, p);
                        const HDGState o =
                            oracle::monolithic_solve(m, k, tau, sigma, c0, f, sigma > 0.0 ? &prev : nullptr, g);
                        CHECK(max_diff(x, o) <= 1e-10);
                    }
    }

    TEST_CASE("residuals, conservativity, Dirichlet consistency")
    {
        const HdgSpace space(build_unit_square_mesh(4), 2);
        const CondensedSystem sys(space, 3.0, 0.7);
        CHECK(sys.size() == space.mesh().num_interior_faces() * space.n_m());
        SteadyProblem p;
        p.sigma = 3.0;
        p.c0 = 0.7;
        p.source = [](const Point& x) { return std::sin(pi * x.x()) * x.y(); };
        p.dirichlet = [](const Point& x) { return x.x() * x.y(); };
        p.previous_u = space.project_elements([](const Point& x) { return x.y(); });
        HDGState history = space.zero_state();
        history.q.setConstant(0.01);
        history.u.setConstant(-0.02);
        p.history = &history;
        const StepData data = make_step_data(space, p);
        const HDGState x = sys.solve(data);
        const Residuals r = evaluate_residuals(space, x, p.sigma, p.c0, data);
        CHECK(r.max_relative() <= 1e-10);
        CHECK(r.transmission <= 1e-10);
        CHECK(r.dirichlet <= 1e-11);

        // the numerical trace is single valued up to the history contribution;
        // without history the two sides cancel pointwise
        p.history = nullptr;
        const HDGState y = sys.solve(make_step_data(space, p));
        const SimplicialMesh& m = space.mesh();
        for (int F : m.interior_faces()) {
            const auto& fe = m.face_elements(F);
            const Eigen::VectorXd a = numerical_trace(space, y, fe[0][0])[fe[0][1]];
            const Eigen::VectorXd b = numerical_trace(space, y, fe[1][0])[fe[1][1]];
            CHECK((a + b).lpNorm<Eigen::Infinity>() <= 1e-10);
        }
        CHECK(sys.solves() == 2);
    }

    TEST_CASE("numerical trace reduces to q.n")
    {
        const HdgSpace space(build_unit_square_mesh(2), 1);
        HDGState s = space.zero_state();
        for (int K = 0; K < space.mesh().num_elements(); ++K)
            space.u_block(s.u, K) = space.project_elements([](const Point&) { return 2.0; }).segment(K * space.n_w(),
                                                                                                    space.n_w());
        s.uhat = space.project_faces([](const Point&) { return 2.0; });
        s.q.setRandom();
        const HdgSpace zero_tau(space.mesh(), 1, Stabilization::constant(0.0));
        for (int K = 0; K < space.mesh().num_elements(); ++K) {
            const auto with = numerical_trace(space, s, K);
            const auto without = numerical_trace(zero_tau, s, K);
            for (std::size_t i = 0; i < with.size(); ++i)
                CHECK((with[i] - without[i]).lpNorm<Eigen::Infinity>() <= 1e-13);
        }
        // tau = 0 on faces 1, 2 in single-face mode
        const HdgSpace single(space.mesh(), 1, Stabilization::single_face(0));
        s.u.setRandom();
        for (int K = 0; K < space.mesh().num_elements(); ++K) {
            const auto a = numerical_trace(single, s, K);
            const auto b = numerical_trace(zero_tau, s, K);
            CHECK((a[1] - b[1]).lpNorm<Eigen::Infinity>() <= 1e-13);
            CHECK((a[2] - b[2]).lpNorm<Eigen::Infinity>() <= 1e-13);
        }
    }

    TEST_CASE("singular configurations are reported")
    {
        const HdgSpace space(build_interval_mesh(0.0, 1.0, 3), 1, Stabilization::constant(0.0));
        CHECK_THROWS_AS(CondensedSystem(space, 0.0, 1.0), ConfigurationError);
        SteadyProblem p;
        CHECK_THROWS_AS(solve_steady(space, p), ConfigurationError);
        CHECK_THROWS_AS(project_VW(space, [](const Point&) { return Point(1.0, 0.0); },
                                   [](const Point&) { return 1.0; }, 2),
                        ConfigurationError);
        try {
            project_VW(space, [](const Point&) { return Point(1.0, 0.0); }, [](const Point&) { return 1.0; }, 2);
        } catch (const ConfigurationError& e) {
            CHECK(std::string(e.what()).find("element 2") != std::string::npos);
        }
        CHECK_THROWS(Stabilization::constant(-1.0));
    }

    TEST_CASE("projection examples")
    {
        const HdgSpace space(build_interval_mesh(0.0, 1.0, 1), 0);
        auto [pq, pu] = project_VW(space, [](const Point& x) { return Point(x.x(), 0.0); },
                                   [](const Point&) { return 1.0; }, 0);
        CHECK(pq(0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(pu(0) == doctest::Approx(1.5).epsilon(1e-14));

        // polynomial pairs are reproduced, both tau modes, d = 1, 2
        for (const SimplicialMesh& m : {build_interval_mesh(0.0, 1.0, 3), build_unit_square_mesh(2)})
            for (const Stabilization& tau : {Stabilization::constant(1.0), Stabilization::single_face(0)}) {
                const HdgSpace s2(m, 2, tau);
                const ScalarField u = [](const Point& x) { return 1.0 + x.x() * x.y() - x.x() * x.x(); };
                const VectorField q = [](const Point& x) { return Point(x.y() - 2.0 * x.x(), x.x()); };
                for (int K = 0; K < m.num_elements(); ++K) {
                    auto [a, b] = project_VW(s2, q, u, K);
                    const auto r = projection_residuals(s2, q, u, K, a, b);
                    CHECK(std::max({r[0], r[1], r[2]}) <= 1e-11);
                    const Point c = s2.geometry(K).to_physical(Point(0.2, m.dim() == 2 ? 0.3 : 0.0));
                    const Eigen::VectorXd phi = s2.basis().values(s2.geometry(K).to_reference(c));
                    const int nw = s2.n_w();
                    CHECK(std::abs(phi.dot(b) - u(c)) <= 1e-12);
                    const Point qc(phi.dot(a.head(nw)), m.dim() == 2 ? phi.dot(a.segment(nw, nw)) : 0.0);
                    CHECK(std::abs(qc.x() - q(c).x()) <= 1e-12);
                    if (m.dim() == 2)
                        CHECK(std::abs(qc.y() - q(c).y()) <= 1e-12);
                }
            }
    }

    TEST_CASE("initial state")
    {
        const HdgSpace space(build_unit_square_mesh(2), 1);
        const HDGState z = initial_state(space, [](const Point&) { return 0.0; },
                                         [](const Point&) { return Point(0.0, 0.0); });
        CHECK(z.u.norm() == 0.0);
        CHECK(z.q.norm() == 0.0);
        CHECK(z.uhat.norm() == 0.0);
        const HDGState s = initial_state(space, [](const Point& x) { return 1.0 + x.x() - 2.0 * x.y(); },
                                         [](const Point&) { return Point(1.0, -2.0); });
        CHECK(l2_error_u(space, s.u, [](const Point& x) { return 1.0 + x.x() - 2.0 * x.y(); }) <= 1e-13);
        CHECK(l2_error_q(space, s.q, [](const Point&) { return Point(-1.0, 2.0); }) <= 1e-13);
        // the initial flux is single valued
        const CondensedSystem sys(space, 1.0, 1.0);
        StepData data;
        data.u_load = Eigen::VectorXd::Zero(s.u.size());
        data.dirichlet = s.uhat;
        CHECK(evaluate_residuals(space, s, 1.0, 1.0, data).jump <= 1e-13);
    }

    TEST_CASE("initial state converges for sin")
    {
        double prev = 0.0, slope = 0.0;
        for (int n : {4, 8, 16}) {
            const HdgSpace space(build_interval_mesh(0.0, 1.0, n), 1);
            const HDGState s = initial_state(space, [](const Point& x) { return std::sin(pi * x.x()); },
                                             [](const Point& x) { return Point(pi * std::cos(pi * x.x()), 0.0); });
            const double e = l2_error_u(space, s.u, [](const Point& x) { return std::sin(pi * x.x()); });
            if (prev > 0.0)
                slope = std::log2(prev / e);
            prev = e;
        }
        CHECK(slope >= 1.9);
    }

    TEST_CASE("tau (P_M u - u) is orthogonal to M_h")
    {
        for (const Stabilization& tau : {Stabilization::constant(2.0), Stabilization::single_face(0)}) {
            const HdgSpace space(build_unit_square_mesh(3), 1, tau);
            const ScalarField u = [](const Point& x) { return std::exp(x.x()) * std::cos(x.y()); };
            const Eigen::VectorXd pm = space.project_faces(u);
            const SimplicialMesh& m = space.mesh();
            const QuadratureRule& r = space.face_rule();
            for (int K = 0; K < m.num_elements(); ++K)
                for (int i = 0; i < 3; ++i) {
                    const int F = m.element_face(K, i);
                    const double t = space.matrices(K).tau[i];
                    Eigen::VectorXd acc = Eigen::VectorXd::Zero(space.n_m());
                    for (std::size_t p = 0; p < r.size(); ++p) {
                        const double s = r.points[p].x();
                        const Eigen::VectorXd mu = space.face_basis().values(s);
                        acc += r.weights[p] * t * (mu.dot(space.m_block(pm, F)) - u(face_point(m, F, s))) * mu;
                    }
                    CHECK(acc.lpNorm<Eigen::Infinity>() <= 1e-14);
                }
        }
    }
}
