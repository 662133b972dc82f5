#pragma once

// Manufactured solutions u = p(t) phi(x) of u_t - B_alpha Lap u = f with a
// power-sum temporal profile p(t) = sum c_b t^b.

#include <string>
#include <vector>

#include "fhdg/timeloop.hpp"

namespace fhdg {

struct PowerTerm {
    double coeff;
    double exponent; ///< >= 0
};

struct ManufacturedCase {
    std::string name;
    int dim = 1;
    double alpha = 0.0;
    bool rates_asserted = true; ///< false for the reduced-regularity profile
    std::vector<PowerTerm> profile;
    ScalarField phi;
    VectorField grad_phi;
    ScalarField neg_laplacian_phi;

    double p(double t) const;
    double dp(double t) const;
    /// B_alpha p from the closed form for powers.
    double p_alpha(double t) const;

    double u(const Point& x, double t) const { return p(t) * phi(x); }
    Point q(const Point& x, double t) const { return -p(t) * grad_phi(x); }
    double f(const Point& x, double t) const { return dp(t) * phi(x) + p_alpha(t) * neg_laplacian_phi(x); }

    SimplicialMesh mesh(int n) const;
    MarchConfig march_config(const TimeGrid& grid) const;
};

/// Known names: sine1d, sine2d, reduced1d, reduced2d, exact1d, exact2d.
ManufacturedCase make_case(const std::string& name, double alpha);
std::vector<std::string> case_names();

} // namespace fhdg
