#pragma once

// Riemann-Liouville kernels and operators on sampled scalar signals, plus the
// backward-Euler convolution quadrature used by the time integrator.
//
// Conventions: omega_mu(t) = t^(mu-1) / Gamma(mu).  For -1 < alpha <= 0 the
// derivative B_alpha v = d/dt (omega_{1+alpha} * v) and the integral
// I_{-alpha} v = omega_{-alpha} * v.  Both are instances of one operator
// family D^g (g = alpha for B_alpha, g = -alpha for I_{-alpha}), which on a
// piecewise-linear signal has the closed form
//
//   D^g v(t) = v(0) omega_{1+g}(t) + sum_i s_i [omega_{2+g}(t - t_i)_+ - omega_{2+g}(t - t_{i+1})_+]
//
// with s_i the slope on [t_i, t_{i+1}].  Everything below is built on it.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fhdg {

/// Order alpha of the sub-diffusion operator, -1 < alpha <= 0.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);
    double value() const noexcept { return alpha_; }
    bool is_heat_limit() const noexcept { return alpha_ == 0.0; }

private:
    double alpha_;
};

/// Index mu > 0 of the kernel omega_mu.
class KernelOrder {
public:
    explicit KernelOrder(double mu);
    double value() const noexcept { return mu_; }

private:
    double mu_;
};

/// Uniform time grid t_n = n T / N, n = 0..N.
struct TimeGrid {
    TimeGrid(double final_time, int steps);

    double final_time;
    int steps;
    double dt;

    double node(int n) const noexcept { return n == steps ? final_time : n * dt; }
};

/// Samples of a real function of time on a strictly increasing grid starting at 0.
class ScalarSignal {
public:
    ScalarSignal(std::vector<double> grid, std::vector<double> values);

    static ScalarSignal sample(const std::function<double(double)>& f, double t_end, int intervals);

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }
    double t_end() const noexcept { return grid_.back(); }
    bool uniform() const noexcept { return uniform_; }

    /// Piecewise-linear reconstruction.
    double operator()(double t) const;

    /// s -> v(T - s) on the reflected grid.
    ScalarSignal reflected() const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    bool uniform_ = false;
};

double gamma_fn(double x);

/// omega_mu(t) = t^(mu-1)/Gamma(mu); throws std::domain_error for t <= 0.
double omega(KernelOrder mu, double t);

/// B_alpha applied to s^beta at t: Gamma(beta+1)/Gamma(beta+1+alpha) t^(beta+alpha).
double rl_derivative_of_power(double beta, FractionalOrder alpha, double t);

/// D^g of the piecewise-linear reconstruction of v, evaluated at t in (0, t_end].
/// g in (-1, 1); g = 0 is the identity.
double rl_apply(const ScalarSignal& v, double g, double t);

/// D^g at every grid node.  The entry at t = 0 is v(0) omega_{1+g}(0), i.e.
/// infinite for g < 0 and v(0) != 0.
std::vector<double> rl_apply_nodes(const ScalarSignal& v, double g);

/// Exact integral over [0, t_end] of the product v(t) D^g w(t) for the
/// piecewise-linear reconstructions of v and w (which must share a grid).
double rl_pairing(const ScalarSignal& v, const ScalarSignal& w, double g);

/// I_{-alpha} v(t) (identity at alpha = 0).
double fractional_integral(const ScalarSignal& v, FractionalOrder alpha, double t);

/// B_alpha v(t).
double fractional_derivative(const ScalarSignal& v, FractionalOrder alpha, double t);

/// B*_alpha v(t) = -(d/dt) int_t^T omega_{1+alpha}(s - t) v(s) ds, evaluated as
/// (B_alpha R v)(T - t) with R v(s) = v(T - s).  Valid for 0 <= t < T.
double adjoint_derivative(const ScalarSignal& v, FractionalOrder alpha, double t, double final_time);

/// I*_{-alpha} v(t) = int_t^T omega_{-alpha}(s - t) v(s) ds.
double adjoint_integral(const ScalarSignal& v, FractionalOrder alpha, double t, double final_time);

/// |v|^2_{beta, t_end}: int v B_beta v for beta <= 0, int v I_beta v for beta > 0.
double seminorm_sq(const ScalarSignal& v, double beta, double t_end);

/// int_t^q omega_{1+alpha}(s - t) omega_{-alpha}(q - s) ds via the Beta function (== 1).
double kernel_convolution_identity(FractionalOrder alpha, double t, double q);

/// Backward-Euler convolution quadrature weights for B_alpha.
struct CQWeights {
    double dt;
    FractionalOrder order;
    std::vector<double> g; ///< coefficients of (1 - zeta)^(-alpha)
    std::vector<double> w; ///< dt^alpha g

    /// sum_{j=0}^{n} w_j v[n-j]
    double apply(std::span<const double> history, std::size_t n) const;
};

CQWeights cq_weights(FractionalOrder alpha, double dt, int steps);

/// Coercivity constant c_alpha and duality constant d_alpha of the fractional operators.
double coercivity_constant(FractionalOrder alpha);
double duality_constant(FractionalOrder alpha);

struct PropertyCheck {
    std::string property; ///< "i" .. "v"
    std::string signal;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; ///< rhs - lhs for inequalities, tolerance - |lhs - rhs| for (v)
    bool pass = false;
};

struct LemmaReport {
    double alpha = 0.0;
    double final_time = 0.0;
    std::vector<PropertyCheck> checks;

    bool all_pass() const;
    bool property_pass(const std::string& property) const;
    double min_slack(const std::string& property) const;
};

struct NamedSignal {
    std::string name;
    std::function<double(double)> f;
};

/// At least 20 smooth polynomial and trigonometric signals.
std::vector<NamedSignal> default_signal_basket();

struct LemmaSuiteOptions {
    int intervals = 2000;       ///< grid resolution for (i)-(iv)
    int limit_levels = 8;       ///< t = 2^-m, m = 1..limit_levels for (v)
    int limit_intervals = 400;
    double limit_rel_tol = 0.01;
};

/// Measures properties (i)-(v) of the fractional operators on each signal of the basket.
/// The pairs for (ii)-(iv) are (v_i, v_i) and (v_i, v_{i+1}).
LemmaReport verify_lemma_properties(FractionalOrder alpha, double final_time,
                                    const std::vector<NamedSignal>& basket,
                                    const LemmaSuiteOptions& options = {});

struct RightInverseCheck {
    int intervals = 0;
    double max_residual = 0.0;
};

/// max over interior nodes of |B*_alpha I*_{-alpha} v - v|, computed with the
/// discrete operators on a uniform grid.
RightInverseCheck right_inverse_residual(const std::function<double(double)>& v,
                                         FractionalOrder alpha, double final_time, int intervals);

} // namespace fhdg
