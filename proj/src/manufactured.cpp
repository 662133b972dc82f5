#include "fhdg/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fhdg {

double ManufacturedCase::p(double t) const
{
    double s = 0.0;
    for (const PowerTerm& term : profile)
        s += term.coeff * (term.exponent == 0.0 ? 1.0 : std::pow(t, term.exponent));
    return s;
}

double ManufacturedCase::dp(double t) const
{
    double s = 0.0;
    for (const PowerTerm& term : profile)
        if (term.exponent != 0.0)
            s += term.coeff * term.exponent * std::pow(t, term.exponent - 1.0);
    return s;
}

double ManufacturedCase::p_alpha(double t) const
{
    if (alpha == 0.0)
        return p(t);
    const FractionalOrder order(alpha);
    double s = 0.0;
    for (const PowerTerm& term : profile)
        s += term.coeff * rl_derivative_of_power(term.exponent, order, t);
    return s;
}

SimplicialMesh ManufacturedCase::mesh(int n) const
{
    return dim == 1 ? build_interval_mesh(0.0, 1.0, n) : build_unit_square_mesh(n);
}

MarchConfig ManufacturedCase::march_config(const TimeGrid& grid) const
{
    MarchConfig c;
    c.grid = grid;
    c.alpha = FractionalOrder(alpha);
    c.source = [this](const Point& x, double t) { return f(x, t); };
    c.dirichlet = [this](const Point& x, double t) { return u(x, t); };
    c.u0 = [this](const Point& x) { return u(x, 0.0); };
    c.grad_u0 = [this](const Point& x) -> Point { return p(0.0) * grad_phi(x); };
    return c;
}

std::vector<std::string> case_names()
{
    return {"sine1d", "sine2d", "reduced1d", "reduced2d", "exact1d", "exact2d"};
}

ManufacturedCase make_case(const std::string& name, double alpha)
{
    constexpr double pi = std::numbers::pi;
    FractionalOrder checked(alpha);
    ManufacturedCase c;
    c.name = name;
    c.alpha = checked.value();

    const bool two_d = name.ends_with("2d");
    c.dim = two_d ? 2 : 1;
    if (name == "sine1d" || name == "reduced1d") {
        c.phi = [](const Point& x) { return std::sin(pi * x[0]); };
        c.grad_phi = [](const Point& x) { return Point(pi * std::cos(pi * x[0]), 0.0); };
        c.neg_laplacian_phi = [](const Point& x) { return pi * pi * std::sin(pi * x[0]); };
    } else if (name == "sine2d" || name == "reduced2d") {
        c.phi = [](const Point& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
        c.grad_phi = [](const Point& x) {
            return Point(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]), pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
        };
        c.neg_laplacian_phi = [](const Point& x) { return 2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    } else if (name == "exact1d") {
        // quadratic with nonzero boundary values
        c.phi = [](const Point& x) { return 1.0 + x[0] * (1.0 - x[0]); };
        c.grad_phi = [](const Point& x) { return Point(1.0 - 2.0 * x[0], 0.0); };
        c.neg_laplacian_phi = [](const Point&) { return 2.0; };
    } else if (name == "exact2d") {
        c.phi = [](const Point& x) { return 1.0 + x[0] * (1.0 - x[0]) + 0.5 * x[0] * x[1]; };
        c.grad_phi = [](const Point& x) { return Point(1.0 - 2.0 * x[0] + 0.5 * x[1], 0.5 * x[0]); };
        c.neg_laplacian_phi = [](const Point&) { return 2.0; };
    } else {
        throw std::invalid_argument("unknown case '" + name + "'");
    }

    if (name.starts_with("reduced")) {
        c.profile = {{1.0, 0.0}, {1.0, 1.0 + std::abs(c.alpha)}};
        c.rates_asserted = false;
    } else if (name.starts_with("exact")) {
        c.profile = {{1.0, 0.0}, {1.0, 1.0}};
    } else {
        c.profile = {{1.0, 0.0}, {1.0, 2.0}};
    }
    return c;
}

} // namespace fhdg
