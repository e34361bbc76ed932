#include "nlt/sampled_field.hpp"

#include <algorithm>
#include <string>

namespace nlt {

SampledField SampledField::on_lattice(const LatticeGeometry& geom,
                                      const std::function<double(const Point&)>& f) {
    SampledField s;
    s.dim = geom.dim;
    s.lattice = geom;
    s.points = geom.nodes();
    s.values.resize(s.points.size());
    for (std::size_t k = 0; k < s.points.size(); ++k) s.values[k] = f(s.points[k]);
    return s;
}

SampledField SampledField::on_lattice(const LatticeGeometry& geom, std::vector<double> values) {
    SampledField s;
    s.dim = geom.dim;
    s.lattice = geom;
    s.points = geom.nodes();
    s.values = std::move(values);
    s.validate();
    return s;
}

SampledField SampledField::scattered(int dim, std::vector<Point> points, std::vector<double> values) {
    SampledField s;
    s.dim = dim;
    s.points = std::move(points);
    s.values = std::move(values);
    s.validate();
    return s;
}

SampledField SampledField::with_values(std::vector<double> v) const {
    SampledField s = *this;
    s.values = std::move(v);
    s.validate();
    return s;
}

void SampledField::validate() const {
    if (dim < 1 || dim > 3) throw DomainError("field dimension must be 1, 2 or 3");
    if (points.size() != values.size())
        throw DomainError("field has " + std::to_string(points.size()) + " points but " +
                          std::to_string(values.size()) + " values");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("field contains a non-finite value");
    if (lattice && lattice->size() != values.size())
        throw DomainError("lattice node count does not match the number of samples");
}

double SampledField::support_radius() const {
    std::size_t nonzero = 0;
    for (double v : values)
        if (v != 0.0) ++nonzero;
    if (nonzero == 0) return 0.0;
    if (lattice) return std::pow(static_cast<double>(nonzero) * lattice->cell_volume(), 1.0 / dim);
    Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] == 0.0) continue;
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], points[k][d]);
            hi[d] = std::max(hi[d], points[k][d]);
        }
    }
    double vol = 1.0;
    for (int d = 0; d < dim; ++d) vol *= std::max(hi[d] - lo[d], 0.0);
    return std::pow(vol, 1.0 / dim);
}

}  // namespace nlt
