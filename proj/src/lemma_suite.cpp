#include "fhdg/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fhdg {

namespace {

constexpr double kRelTol = 1e-10;

PropertyCheck inequality(std::string property, std::string signal, double small, double large)
{
    PropertyCheck c{std::move(property), std::move(signal), small, large, large - small, false};
    const double scale = std::max({std::abs(small), std::abs(large), 1e-300});
    c.pass = c.slack >= -kRelTol * scale;
    return c;
}

double sup_sq(const ScalarSignal& v)
{
    double m = 0.0;
    for (double x : v.values())
        m = std::max(m, x * x);
    return m;
}

} // namespace

bool LemmaReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

bool LemmaReport::property_pass(const std::string& property) const
{
    return std::all_of(checks.begin(), checks.end(),
                       [&](const PropertyCheck& c) { return c.property != property || c.pass; });
}

double LemmaReport::min_slack(const std::string& property) const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks)
        if (c.property == property)
            m = std::min(m, c.slack);
    return m;
}

std::vector<NamedSignal> default_signal_basket()
{
    return {
        {"1", [](double) { return 1.0; }},
        {"t", [](double t) { return t; }},
        {"t^2", [](double t) { return t * t; }},
        {"t^3", [](double t) { return t * t * t; }},
        {"1+t", [](double t) { return 1.0 + t; }},
        {"1-t", [](double t) { return 1.0 - t; }},
        {"1+t^2", [](double t) { return 1.0 + t * t; }},
        {"2-t+t^2", [](double t) { return 2.0 - t + t * t; }},
        {"(1+t)^3", [](double t) { return (1.0 + t) * (1.0 + t) * (1.0 + t); }},
        {"t(1-t)", [](double t) { return t * (1.0 - t); }},
        {"1-3t+t^3", [](double t) { return 1.0 - 3.0 * t + t * t * t; }},
        {"t^4-t+1", [](double t) { return t * t * t * t - t + 1.0; }},
        {"sin(pi t)", [](double t) { return std::sin(M_PI * t); }},
        {"cos(pi t)", [](double t) { return std::cos(M_PI * t); }},
        {"sin(2 pi t)", [](double t) { return std::sin(2.0 * M_PI * t); }},
        {"2+cos(2 pi t)", [](double t) { return 2.0 + std::cos(2.0 * M_PI * t); }},
        {"exp(-t)", [](double t) { return std::exp(-t); }},
        {"exp(t)", [](double t) { return std::exp(t); }},
        {"1/(1+t)", [](double t) { return 1.0 / (1.0 + t); }},
        {"sin(3t)+t", [](double t) { return std::sin(3.0 * t) + t; }},
        {"cos(t)-t^2", [](double t) { return std::cos(t) - t * t; }},
        {"1+0.5sin(5t)", [](double t) { return 1.0 + 0.5 * std::sin(5.0 * t); }},
        {"exp(-2t)cos(3t)", [](double t) { return std::exp(-2.0 * t) * std::cos(3.0 * t); }},
    };
}

LemmaReport verify_lemma_properties(FractionalOrder alpha, double final_time,
                                    const std::vector<NamedSignal>& basket,
                                    const LemmaSuiteOptions& options)
{
    const double a = alpha.value();
    const double c_alpha = coercivity_constant(alpha);
    const double d_alpha = duality_constant(alpha);

    LemmaReport report;
    report.alpha = a;
    report.final_time = final_time;

    std::vector<ScalarSignal> signals;
    signals.reserve(basket.size());
    for (const auto& s : basket)
        signals.push_back(ScalarSignal::sample(s.f, final_time, options.intervals));

    std::vector<double> semi_alpha(signals.size()), semi_minus(signals.size());
    for (std::size_t i = 0; i < signals.size(); ++i) {
        semi_alpha[i] = std::max(0.0, rl_pairing(signals[i], signals[i], a));
        semi_minus[i] = std::max(0.0, rl_pairing(signals[i], signals[i], -a));
    }

    for (std::size_t i = 0; i < signals.size(); ++i) {
        const auto& v = signals[i];
        const std::string& name = basket[i].name;

        // (i) |v|_alpha^2 >= c_alpha T^alpha int v^2
        const double l2 = rl_pairing(v, v, 0.0);
        report.checks.push_back(inequality("i", name, c_alpha * std::pow(final_time, a) * l2,
                                           rl_pairing(v, v, a)));

        for (std::size_t j : {i, (i + 1) % signals.size()}) {
            const auto& w = signals[j];
            const std::string pair = j == i ? name : name + " | " + basket[j].name;
            // (ii) int v w <= d |v|_alpha |w|_{-alpha}
            report.checks.push_back(inequality("ii", pair, rl_pairing(v, w, 0.0),
                                               d_alpha * std::sqrt(semi_alpha[i] * semi_minus[j])));
            // (iii) int v B_alpha w <= d |v|_alpha |w|_alpha
            report.checks.push_back(inequality("iii", pair, rl_pairing(v, w, a),
                                               d_alpha * std::sqrt(semi_alpha[i] * semi_alpha[j])));
            // (iv) int I_{-alpha} v w <= d |v|_{-alpha} |w|_{-alpha}
            report.checks.push_back(inequality("iv", pair, rl_pairing(w, v, -a),
                                               d_alpha * std::sqrt(semi_minus[i] * semi_minus[j])));
        }

        // (v) omega_{alpha+2}(t)^{-1} int_0^t v B_alpha v -> v(0)^2 over t = 2^-m T.  The
        // ratio expands in integer powers of t, so a full Richardson table removes them.
        const double v0 = basket[i].f(0.0);
        const int depth = 4;
        std::vector<double> table;
        for (int m = options.limit_levels - depth + 1; m <= options.limit_levels; ++m) {
            const double t = final_time * std::ldexp(1.0, -m);
            const ScalarSignal local = ScalarSignal::sample(basket[i].f, t, options.limit_intervals);
            table.push_back(rl_pairing(local, local, a) / omega(KernelOrder(a + 2.0), t));
        }
        for (int order = 1; order < depth; ++order) {
            const double factor = std::ldexp(1.0, order);
            for (int r = depth - 1; r >= order; --r)
                table[r] = (factor * table[r] - table[r - 1]) / (factor - 1.0);
        }
        const double limit = table.back();
        const double target = v0 * v0;
        const double tol = options.limit_rel_tol * std::max(target, 1e-2 * sup_sq(v));
        PropertyCheck c{"v", name, limit, target, tol - std::abs(limit - target), false};
        c.pass = c.slack >= 0.0;
        report.checks.push_back(c);
    }
    return report;
}

RightInverseCheck right_inverse_residual(const std::function<double(double)>& v,
                                         FractionalOrder alpha, double final_time, int intervals)
{
    // B*_alpha I*_{-alpha} = R B_alpha I_{-alpha} R.  The intermediate signal
    // I_{-alpha} R v = c omega_{1-alpha} + r with c = R v(0); the singular part is
    // carried exactly (B_alpha omega_{1-alpha} = 1) and only r is interpolated.
    const ScalarSignal reflected =
        ScalarSignal::sample([&](double s) { return v(final_time - s); }, final_time, intervals);
    const std::vector<double> integral = rl_apply_nodes(reflected, -alpha.value());
    const double c = reflected.values()[0];
    std::vector<double> remainder(integral.size());
    for (std::size_t n = 0; n < integral.size(); ++n) {
        const double s = reflected.grid()[n];
        remainder[n] = integral[n] - (s > 0.0 ? c * std::pow(s, -alpha.value()) / gamma_fn(1.0 - alpha.value()) : 0.0);
    }
    const ScalarSignal r(std::vector<double>(reflected.grid().begin(), reflected.grid().end()), remainder);
    std::vector<double> composed = rl_apply_nodes(r, alpha.value());
    for (double& x : composed)
        x += c;

    RightInverseCheck out{intervals, 0.0};
    for (int n = 1; n < intervals; ++n) {
        const double t = reflected.grid()[n];
        const double residual = std::abs(composed[intervals - n] - v(t));
        out.max_residual = std::max(out.max_residual, residual);
    }
    return out;
}

} // namespace fhdg
