#include "fhdg/timeloop.hpp"

#include <algorithm>
#include <cmath>

namespace fhdg {

namespace {

bool finite(const HDGState& x)
{
    return x.u.allFinite() && x.q.allFinite() && x.uhat.allFinite();
}

} // namespace

DivergenceError::DivergenceError(int step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step)
{
}

MarchResult march(const HdgSpace& space, const MarchConfig& config)
{
    const TimeGrid& grid = config.grid;
    const CQWeights cq = cq_weights(config.alpha, grid.dt, grid.steps);
    const double sigma = 1.0 / grid.dt;
    const double c0 = cq.w[0];

    MarchResult result;
    result.grid = grid;
    result.states.reserve(grid.steps + 1);
    result.residuals.reserve(grid.steps);

    if (config.u0) {
        const VectorField grad = config.grad_u0 ? config.grad_u0 : VectorField([](const Point&) {
            return Point(Point::Zero());
        });
        result.states.push_back(initial_state(space, config.u0, grad));
    } else {
        result.states.push_back(space.zero_state());
    }
    if (!finite(result.states[0]))
        throw DivergenceError(0, "non-finite initial state");

    const CondensedSystem system(space, sigma, c0);
    result.counters.factorizations = 1;

    HDGState history = space.zero_state();
    for (int n = 1; n <= grid.steps; ++n) {
        const double t = grid.node(n);

        history.u.setZero();
        history.q.setZero();
        history.uhat.setZero();
        double weight_sum = cq.w[0];
        for (int j = 1; j <= n; ++j) {
            history.axpy(cq.w[j], result.states[n - j]);
            weight_sum += cq.w[j];
        }
        if (config.initial_correction && !config.alpha.is_heat_limit())
            history.axpy(omega(KernelOrder(1.0 + config.alpha.value()), t) - weight_sum, result.states[0]);
        result.counters.convolution_terms += n;
        result.counters.terms_per_step.push_back(n);

        SteadyProblem problem;
        problem.sigma = sigma;
        problem.c0 = c0;
        if (config.source)
            problem.source = [&](const Point& x) { return config.source(x, t); };
        problem.previous_u = result.states[n - 1].u;
        problem.history = &history;
        if (config.dirichlet)
            problem.dirichlet = [&](const Point& x) { return config.dirichlet(x, t); };

        const StepData data = make_step_data(space, problem);
        HDGState x = system.solve(data);
        if (!finite(x))
            throw DivergenceError(n, "non-finite coefficients");

        const Residuals r = evaluate_residuals(space, x, sigma, c0, data);
        result.max_transmission = std::max(result.max_transmission, r.transmission);
        result.max_relative_residual = std::max(result.max_relative_residual, r.max_relative());
        result.residuals.push_back(r);
        result.states.push_back(std::move(x));
    }
    result.counters.back_substitutions = system.solves();
    result.counters.stored_states = static_cast<long>(result.states.size());
    return result;
}

double linfty_l2_error(const HdgSpace& space, const MarchResult& result, const SpaceTimeField& exact_u)
{
    double err = 0.0;
    for (std::size_t n = 0; n < result.states.size(); ++n) {
        const double t = result.grid.node(static_cast<int>(n));
        err = std::max(err, l2_error_u(space, result.states[n].u, [&](const Point& x) { return exact_u(x, t); }));
    }
    return err;
}

double linfty_l2_error_q(const HdgSpace& space, const MarchResult& result, const SpaceTimeVectorField& exact_q)
{
    double err = 0.0;
    for (std::size_t n = 0; n < result.states.size(); ++n) {
        const double t = result.grid.node(static_cast<int>(n));
        err = std::max(err, l2_error_q(space, result.states[n].q, [&](const Point& x) { return exact_q(x, t); }));
    }
    return err;
}

} // namespace fhdg
