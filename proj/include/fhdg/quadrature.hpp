#pragma once

#include <vector>

#include "fhdg/mesh.hpp"

namespace fhdg {

/// Points and weights on a reference simplex: [0,1] (d = 1), the triangle
/// (0,0),(1,0),(0,1) (d = 2), or the single point of a 0-dimensional face.
struct QuadratureRule {
    int dim = 0;
    int degree = 0; ///< exactness degree
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// Rule exact for total degree `degree` on the reference simplex of dimension dim.
/// d = 2 uses a collapsed (Duffy) tensor Gauss rule.
QuadratureRule simplex_rule(int dim, int degree);

double reference_measure(int dim);

} // namespace fhdg
