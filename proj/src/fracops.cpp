#include "fhdg/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhdg {

namespace {

// omega_mu(r) extended by 0 at r <= 0; only used with mu > 1.
double omega_plus(double mu, double r)
{
    return r > 0.0 ? std::pow(r, mu - 1.0) / std::tgamma(mu) : 0.0;
}

void check_order(double g)
{
    if (!(g > -1.0 && g < 1.0))
        throw std::domain_error("operator order must lie in (-1, 1)");
}

std::vector<double> slopes_of(const ScalarSignal& v)
{
    const auto t = v.grid();
    const auto x = v.values();
    std::vector<double> s(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        s[i] = (x[i + 1] - x[i]) / (t[i + 1] - t[i]);
    return s;
}

// Signal restricted to [0, t_end], with an interpolated final node if needed.
ScalarSignal truncate(const ScalarSignal& v, double t_end)
{
    if (t_end > v.t_end() * (1.0 + 1e-14))
        throw std::domain_error("t_end exceeds the signal grid");
    if (t_end >= v.t_end())
        return v;
    std::vector<double> grid;
    std::vector<double> values;
    for (std::size_t i = 0; i < v.size() && v.grid()[i] < t_end; ++i) {
        grid.push_back(v.grid()[i]);
        values.push_back(v.values()[i]);
    }
    grid.push_back(t_end);
    values.push_back(v(t_end));
    return ScalarSignal(std::move(grid), std::move(values));
}

} // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha)
{
    if (!(alpha > -1.0 && alpha <= 0.0))
        throw std::invalid_argument("fractional order alpha must satisfy -1 < alpha <= 0");
}

KernelOrder::KernelOrder(double mu) : mu_(mu)
{
    if (!(mu > 0.0))
        throw std::invalid_argument("kernel order mu must be positive");
}

TimeGrid::TimeGrid(double final_time_, int steps_)
    : final_time(final_time_), steps(steps_), dt(final_time_ / steps_)
{
    if (!(final_time_ > 0.0) || steps_ < 1)
        throw std::invalid_argument("time grid needs T > 0 and N >= 1");
}

ScalarSignal::ScalarSignal(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (grid_.size() != values_.size())
        throw std::invalid_argument("signal: sample count does not match grid");
    if (grid_.size() < 2)
        throw std::invalid_argument("signal: need at least two samples");
    if (grid_.front() != 0.0)
        throw std::invalid_argument("signal: grid must start at t = 0");
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (!(grid_[i] > grid_[i - 1]))
            throw std::invalid_argument("signal: grid must be strictly increasing");

    const double h = grid_[1] - grid_[0];
    uniform_ = true;
    for (std::size_t i = 1; i < grid_.size() && uniform_; ++i)
        uniform_ = std::abs((grid_[i] - grid_[i - 1]) - h) <= 1e-8 * h;
}

ScalarSignal ScalarSignal::sample(const std::function<double(double)>& f, double t_end, int intervals)
{
    if (intervals < 1 || !(t_end > 0.0))
        throw std::invalid_argument("signal: need t_end > 0 and at least one interval");
    std::vector<double> grid(intervals + 1);
    std::vector<double> values(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        grid[i] = (i == intervals) ? t_end : t_end * i / intervals;
        values[i] = f(grid[i]);
    }
    return ScalarSignal(std::move(grid), std::move(values));
}

double ScalarSignal::operator()(double t) const
{
    if (t < 0.0 || t > grid_.back() * (1.0 + 1e-14))
        throw std::domain_error("signal evaluated outside its grid");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.end())
        return values_.back();
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double theta = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return (1.0 - theta) * values_[i] + theta * values_[i + 1];
}

ScalarSignal ScalarSignal::reflected() const
{
    const double T = grid_.back();
    const std::size_t n = grid_.size();
    std::vector<double> grid(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = T - grid_[n - 1 - i];
        values[i] = values_[n - 1 - i];
    }
    grid[0] = 0.0;
    grid[n - 1] = T;
    return ScalarSignal(std::move(grid), std::move(values));
}

double gamma_fn(double x)
{
    return std::tgamma(x);
}

double omega(KernelOrder mu, double t)
{
    if (!(t > 0.0))
        throw std::domain_error("omega: kernel undefined for t <= 0");
    return std::pow(t, mu.value() - 1.0) / gamma_fn(mu.value());
}

double rl_derivative_of_power(double beta, FractionalOrder alpha, double t)
{
    if (beta < 0.0)
        throw std::domain_error("rl_derivative_of_power: beta must be nonnegative");
    if (!(t > 0.0))
        throw std::domain_error("rl_derivative_of_power: t must be positive");
    const double a = alpha.value();
    return gamma_fn(beta + 1.0) / gamma_fn(beta + 1.0 + a) * std::pow(t, beta + a);
}

double rl_apply(const ScalarSignal& v, double g, double t)
{
    check_order(g);
    if (!(t > 0.0) || t > v.t_end() * (1.0 + 1e-14))
        throw std::domain_error("rl_apply: t outside (0, t_end]");
    if (g == 0.0)
        return v(t);

    const auto grid = v.grid();
    const auto x = v.values();
    double sum = x[0] * std::pow(t, g) / gamma_fn(1.0 + g);
    const double mu = 2.0 + g;
    for (std::size_t i = 0; i + 1 < grid.size() && grid[i] < t; ++i) {
        const double s = (x[i + 1] - x[i]) / (grid[i + 1] - grid[i]);
        sum += s * (omega_plus(mu, t - grid[i]) - omega_plus(mu, t - grid[i + 1]));
    }
    return sum;
}

std::vector<double> rl_apply_nodes(const ScalarSignal& v, double g)
{
    check_order(g);
    const auto grid = v.grid();
    const auto x = v.values();
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    if (g == 0.0) {
        std::copy(x.begin(), x.end(), out.begin());
        return out;
    }

    out[0] = g > 0.0 ? 0.0 : (x[0] == 0.0 ? 0.0 : x[0] * HUGE_VAL);
    if (!v.uniform()) {
        for (std::size_t m = 1; m < n; ++m)
            out[m] = rl_apply(v, g, grid[m]);
        return out;
    }

    const double dt = grid[1] - grid[0];
    const double mu = 2.0 + g;
    const double gm1 = gamma_fn(1.0 + g);
    // increments of omega_{2+g} over one cell, indexed by distance in cells
    std::vector<double> inc(n);
    inc[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j)
        inc[j] = omega_plus(mu, j * dt) - omega_plus(mu, (j - 1) * dt);
    const std::vector<double> s = slopes_of(v);
    for (std::size_t m = 1; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            acc += s[i] * inc[m - i];
        out[m] = x[0] * std::pow(grid[m], g) / gm1 + acc;
    }
    return out;
}

double rl_pairing(const ScalarSignal& v, const ScalarSignal& w, double g)
{
    check_order(g);
    if (v.size() != w.size())
        throw std::invalid_argument("rl_pairing: signals must share a grid");
    const auto t = v.grid();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != w.grid()[i])
            throw std::invalid_argument("rl_pairing: signals must share a grid");

    const std::size_t cells = t.size() - 1;
    const auto vx = v.values();
    const double w0 = w.values()[0];
    const std::vector<double> sv = slopes_of(v);
    const std::vector<double> sw = slopes_of(w);
    std::vector<double> dsw(cells);
    for (std::size_t i = 0; i < cells; ++i)
        dsw[i] = sw[i] - (i > 0 ? sw[i - 1] : 0.0);

    // int_{t_m}^{t_{m+1}} v(t) omega_mu(t - c) dt, exact for linear v on the cell
    auto cell_moment = [&](std::size_t m, double c, double mu) {
        const double a = t[m] - c;
        const double b = t[m + 1] - c;
        const double p1 = omega_plus(mu + 1.0, b) - omega_plus(mu + 1.0, a);
        const double p2 = mu * (omega_plus(mu + 2.0, b) - omega_plus(mu + 2.0, a));
        return (vx[m] - sv[m] * a) * p1 + sv[m] * p2;
    };

    double total = 0.0;
    for (std::size_t m = 0; m < cells; ++m)
        total += w0 * cell_moment(m, 0.0, 1.0 + g);

    const double mu = 2.0 + g;
    if (!v.uniform()) {
        for (std::size_t m = 0; m < cells; ++m)
            for (std::size_t i = 0; i <= m; ++i)
                total += dsw[i] * cell_moment(m, t[i], mu);
        return total;
    }

    const double dt = t[1] - t[0];
    std::vector<double> p1(cells), p2(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        p1[j] = omega_plus(mu + 1.0, (j + 1) * dt) - omega_plus(mu + 1.0, j * dt);
        p2[j] = mu * (omega_plus(mu + 2.0, (j + 1) * dt) - omega_plus(mu + 2.0, j * dt));
    }
    for (std::size_t m = 0; m < cells; ++m) {
        double c1 = 0.0, c2 = 0.0, c3 = 0.0;
        for (std::size_t j = 0; j <= m; ++j) {
            const double d = dsw[m - j];
            c1 += d * p1[j];
            c2 += d * static_cast<double>(j) * p1[j];
            c3 += d * p2[j];
        }
        total += vx[m] * c1 - sv[m] * dt * c2 + sv[m] * c3;
    }
    return total;
}

double fractional_integral(const ScalarSignal& v, FractionalOrder alpha, double t)
{
    if (t < 0.0 || t > v.t_end() * (1.0 + 1e-14))
        throw std::domain_error("fractional_integral: t outside the signal grid");
    if (alpha.is_heat_limit())
        return v(t);
    if (t == 0.0)
        return 0.0;
    return rl_apply(v, -alpha.value(), t);
}

double fractional_derivative(const ScalarSignal& v, FractionalOrder alpha, double t)
{
    if (alpha.is_heat_limit())
        return v(t);
    return rl_apply(v, alpha.value(), t);
}

double adjoint_derivative(const ScalarSignal& v, FractionalOrder alpha, double t, double final_time)
{
    if (std::abs(final_time - v.t_end()) > 1e-12 * final_time)
        throw std::invalid_argument("adjoint_derivative: signal must be sampled on [0, T]");
    if (t < 0.0 || !(t < final_time))
        throw std::domain_error("adjoint_derivative: t outside [0, T)");
    if (alpha.is_heat_limit())
        return v(t);
    return rl_apply(v.reflected(), alpha.value(), final_time - t);
}

double adjoint_integral(const ScalarSignal& v, FractionalOrder alpha, double t, double final_time)
{
    if (std::abs(final_time - v.t_end()) > 1e-12 * final_time)
        throw std::invalid_argument("adjoint_integral: signal must be sampled on [0, T]");
    if (t < 0.0 || t > final_time)
        throw std::domain_error("adjoint_integral: t outside [0, T]");
    if (alpha.is_heat_limit())
        return v(t);
    if (t == final_time)
        return 0.0;
    return rl_apply(v.reflected(), -alpha.value(), final_time - t);
}

double seminorm_sq(const ScalarSignal& v, double beta, double t_end)
{
    if (!(std::abs(beta) < 1.0))
        throw std::domain_error("seminorm_sq: |beta| must be < 1");
    const ScalarSignal vt = truncate(v, t_end);
    return rl_pairing(vt, vt, beta);
}

double kernel_convolution_identity(FractionalOrder alpha, double t, double q)
{
    if (!(q > t))
        throw std::domain_error("kernel_convolution_identity: need q > t");
    const double a = alpha.value();
    if (a == 0.0)
        return 1.0;
    // int_0^L r^a (L - r)^(-a-1) dr = L^0 B(1 + a, -a)
    return std::beta(1.0 + a, -a) / (gamma_fn(1.0 + a) * gamma_fn(-a));
}

double CQWeights::apply(std::span<const double> history, std::size_t n) const
{
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j)
        acc += w[j] * history[n - j];
    return acc;
}

CQWeights cq_weights(FractionalOrder alpha, double dt, int steps)
{
    if (!(dt > 0.0) || steps < 1)
        throw std::invalid_argument("cq_weights: need dt > 0 and N >= 1");
    const double a = alpha.value();
    CQWeights cq{dt, alpha, std::vector<double>(steps + 1), std::vector<double>(steps + 1)};
    cq.g[0] = 1.0;
    for (int j = 1; j <= steps; ++j)
        cq.g[j] = cq.g[j - 1] * (j - 1 + a) / j;
    const double scale = std::pow(dt, a);
    for (int j = 0; j <= steps; ++j)
        cq.w[j] = scale * cq.g[j];
    return cq;
}

double coercivity_constant(FractionalOrder alpha)
{
    const double a = alpha.value();
    if (a == 0.0)
        return 1.0;
    return std::cos(a * M_PI / 2.0) / std::pow(M_PI, a) * std::pow(std::abs(a), -a) /
           std::pow(1.0 - a, 1.0 - a);
}

double duality_constant(FractionalOrder alpha)
{
    return 1.0 / std::cos(alpha.value() * M_PI / 2.0);
}

} // namespace fhdg
