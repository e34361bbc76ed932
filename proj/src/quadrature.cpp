#include "nlt/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <memory>

namespace nlt {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
        table(gsl_integration_glfixed_table_alloc(static_cast<size_t>(n)),
              &gsl_integration_glfixed_table_free);
    if (!table) throw NumericalError("Gauss-Legendre table allocation failed");
    x.resize(n);
    w.resize(n);
    for (int k = 0; k < n; ++k) {
        double xi = 0.0, wi = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(k), &xi, &wi, table.get());
        x[k] = xi;
        w[k] = wi;
    }
}

SphereRule sphere_rule(int dim, int order) {
    if (order < 2) throw DomainError("sphere quadrature order must be at least 2");
    SphereRule rule;
    rule.dim = dim;
    if (dim == 2) {
        const double dtheta = 2.0 * kPi / order;
        rule.nodes.reserve(order);
        for (int m = 0; m < order; ++m) {
            // half-step offset keeps nodes off the coordinate axes
            const double th = (m + 0.5) * dtheta;
            rule.nodes.push_back({std::cos(th), std::sin(th), 0.0});
            rule.weights.push_back(dtheta);
        }
        return rule;
    }
    if (dim != 3) throw DomainError("sphere quadrature is defined for n = 2 or 3");
    std::vector<double> z, wz;
    gauss_legendre(std::max(1, order / 2), z, wz);
    const double dphi = 2.0 * kPi / order;
    rule.nodes.reserve(z.size() * order);
    for (std::size_t a = 0; a < z.size(); ++a) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z[a] * z[a]));
        for (int m = 0; m < order; ++m) {
            const double ph = (m + 0.5) * dphi;
            rule.nodes.push_back({s * std::cos(ph), s * std::sin(ph), z[a]});
            rule.weights.push_back(wz[a] * dphi);
        }
    }
    return rule;
}

}  // namespace nlt
