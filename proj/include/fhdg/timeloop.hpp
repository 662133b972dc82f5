#pragma once

// Convolution-quadrature time marching of u_t - B_alpha Lap u = f.
//
// Step n solves
//   sigma (u^n - u^{n-1}, w) + sum_{j=0}^{n} w_j D(x^{n-j}) = (f(t_n), w)
// with sigma = 1/dt and backward-Euler CQ weights w_j.  The history
// H^n = sum_{j>=1} w_j x^{n-j} is a full HDG state, so the volume term and the
// numerical trace share one convolution.
//
// With initial_correction the convolution acts on x - x^0 and the constant
// part is integrated exactly, B_alpha x^0 = omega_{1+alpha}(t) x^0.  Without
// it the error of a nonzero initial flux decays only like dt^{1+alpha}.

#include <functional>
#include <vector>

#include "fhdg/fracops.hpp"
#include "fhdg/hdg.hpp"

namespace fhdg {

using SpaceTimeField = std::function<double(const Point&, double)>;
using SpaceTimeVectorField = std::function<Point(const Point&, double)>;

struct MarchConfig {
    TimeGrid grid{1.0, 1};
    FractionalOrder alpha{0.0};
    SpaceTimeField source;     ///< f(x, t); empty means zero
    SpaceTimeField dirichlet;  ///< g(x, t); empty means zero
    ScalarField u0;            ///< empty means zero
    VectorField grad_u0;       ///< gradient of u0; empty means zero
    bool initial_correction = true;
};

/// Operation counts of one march.
struct MarchCounters {
    long factorizations = 0;
    long back_substitutions = 0;
    long convolution_terms = 0; ///< state axpys spent on the history
    std::vector<long> terms_per_step;
    long stored_states = 0;
};

struct MarchResult {
    TimeGrid grid{1.0, 1};
    std::vector<HDGState> states; ///< t_0 .. t_N; also the convolution history
    std::vector<Residuals> residuals; ///< per step n >= 1
    double max_transmission = 0.0;
    double max_relative_residual = 0.0;
    MarchCounters counters;
};

/// Raised when a step produces non-finite coefficients.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int step, const std::string& what);
    int step() const noexcept { return step_; }

private:
    int step_;
};

MarchResult march(const HdgSpace& space, const MarchConfig& config);

/// max_n ||u(t_n) - u_h^n||_{L2} and the q counterpart.
double linfty_l2_error(const HdgSpace& space, const MarchResult& result, const SpaceTimeField& exact_u);
double linfty_l2_error_q(const HdgSpace& space, const MarchResult& result, const SpaceTimeVectorField& exact_q);

} // namespace fhdg
