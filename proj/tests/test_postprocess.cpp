#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fhdg/postprocess.hpp"

using namespace fhdg;

namespace {

HDGState pair_state(const HdgSpace& space, const ScalarField& u, const VectorField& q)
{
    HDGState s = space.zero_state();
    s.u = space.project_elements(u);
    for (int K = 0; K < space.mesh().num_elements(); ++K)
        for (int c = 0; c < space.dim(); ++c) {
            const Eigen::VectorXd qc = space.project_elements([&](const Point& x) { return q(x)(c); });
            space.q_block(s.q, K).segment(c * space.n_w(), space.n_w()) = space.u_block(qc, K);
        }
    return s;
}

} // namespace

TEST_SUITE("postprocess")
{
    TEST_CASE("constants are kept")
    {
        const HdgSpace space(build_unit_square_mesh(2), 1);
        const Postprocessor post(space);
        const HDGState s = pair_state(space, [](const Point&) { return 3.5; },
                                      [](const Point&) { return Point(0.0, 0.0); });
        CHECK(post.l2_error(post.apply(s), [](const Point&) { return 3.5; }) <= 1e-13);
    }

    TEST_CASE("recovers x^2 from its mean and flux")
    {
        const HdgSpace space(build_interval_mesh(0.0, 1.0, 1), 1);
        const Postprocessor post(space);
        const HDGState s = pair_state(space, [](const Point& x) { return x.x() * x.x(); },
                                      [](const Point& x) { return Point(-2.0 * x.x(), 0.0); });
        CHECK(space.u_block(s.u, 0)(0) == doctest::Approx(1.0 / 3.0));
        const PostState ps = post.apply(s);
        CHECK(ps.degree == 2);
        for (double x : {0.0, 0.3, 1.0})
            CHECK(post.eval(ps, 0, Point(x, 0.0)) == doctest::Approx(x * x).epsilon(1e-13));
    }

    TEST_CASE("reproduces P_{k+1} and preserves element means")
    {
        const HdgSpace space(build_unit_square_mesh(3), 1);
        const Postprocessor post(space);
        const ScalarField u = [](const Point& x) { return 1.0 + x.x() * x.y() - 2.0 * x.y() * x.y(); };
        const HDGState s = pair_state(space, u, [](const Point& x) { return Point(-x.y(), -x.x() + 4.0 * x.y()); });
        const PostState ps = post.apply(s);
        CHECK(post.l2_error(ps, u) <= 1e-12);

        HDGState r = space.zero_state();
        r.u.setRandom();
        r.q.setRandom();
        const PostState pr = post.apply(r);
        for (int K = 0; K < space.mesh().num_elements(); ++K) {
            const PostprocessClass& cd = post.class_data(K);
            CHECK(std::abs(cd.star_mean.dot(pr.block(K)) - cd.w_mean.dot(space.u_block(r.u, K))) <= 1e-13);
            const auto [stiff, mean] = post.residuals(pr, r, K);
            CHECK(stiff <= 1e-12);
            CHECK(mean <= 1e-13);
            CHECK((postprocess_element(space, r.u, r.q, K) - pr.block(K)).lpNorm<Eigen::Infinity>() <= 1e-11);
        }
    }

    TEST_CASE("shape classes share their matrices")
    {
        const HdgSpace sq(build_unit_square_mesh(4), 2);
        const Postprocessor post(sq);
        CHECK(post.num_shape_classes() == 2);
        for (int K = 0; K < sq.mesh().num_elements(); ++K) {
            const PostprocessClass fresh = post.assemble(K);
            const PostprocessClass& cached = post.class_data(K);
            CHECK((fresh.system - cached.system).lpNorm<Eigen::Infinity>() <= 1e-12);
            CHECK((fresh.grad_pairing - cached.grad_pairing).lpNorm<Eigen::Infinity>() <= 1e-12);
            CHECK((fresh.star_mean - cached.star_mean).lpNorm<Eigen::Infinity>() <= 1e-13);
        }
        const HdgSpace line(build_interval_mesh(0.0, 1.0, 8), 1);
        CHECK(Postprocessor(line).num_shape_classes() == 1);
    }

    TEST_CASE("kappa")
    {
        // kappa log kappa = e at alpha = 0
        const KappaResult e = compute_kappa(0.0, 1.0, 1.0, std::sqrt(std::exp(1.0)));
        CHECK(e.kappa == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
        CHECK_FALSE(e.clamped);

        // round trip at alpha = -1/2
        const double k0 = 10.0;
        const double rhs = std::sqrt(k0) * std::log(k0);
        const KappaResult r = compute_kappa(-0.5, 1.0, 1.0 / std::sqrt(rhs));
        CHECK(r.kappa == doctest::Approx(k0).epsilon(1e-12));
        CHECK(r.residual <= 1e-13);

        // smaller rho needs a larger kappa
        double prev = 0.0;
        for (double rho : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const double k = compute_kappa(-0.3, 1.0, rho).kappa;
            CHECK(k > prev);
            prev = k;
        }

        const KappaResult c = compute_kappa(-0.5, 1.0, 10.0);
        CHECK(c.clamped);
        CHECK(c.kappa == doctest::Approx(std::exp(1.0)));

        CHECK_THROWS_AS(compute_kappa(-1.0, 1.0, 0.1), std::domain_error);
        CHECK_THROWS_AS(compute_kappa(-0.5, 1.0, 0.0), std::domain_error);
    }
}
