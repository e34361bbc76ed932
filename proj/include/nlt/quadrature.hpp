#pragma once

#include <vector>

#include "nlt/core.hpp"

namespace nlt {

/// Nodes and weights on the unit sphere S^{n-1} for n = 2 or 3.
/// n = 2: composite trapezoid with `order` equispaced nodes (spectral for
/// smooth periodic integrands). n = 3: Gauss-Legendre in cos(theta) with
/// order/2 nodes times trapezoid in phi with `order` nodes.
struct SphereRule {
    int dim = 2;
    std::vector<Point> nodes;
    std::vector<double> weights;
};

SphereRule sphere_rule(int dim, int order);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace nlt
