#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nlt/core.hpp"
#include "nlt/lattice.hpp"

namespace nlt {

/// Scalar samples on a finite point set. When `lattice` is set, point k is
/// lattice node k (flat order) and stencil-based operations become available.
struct SampledField {
    int dim = 1;
    std::vector<Point> points;
    std::vector<double> values;
    std::optional<LatticeGeometry> lattice;

    static SampledField on_lattice(const LatticeGeometry& geom,
                                   const std::function<double(const Point&)>& f);
    static SampledField on_lattice(const LatticeGeometry& geom, std::vector<double> values);
    static SampledField scattered(int dim, std::vector<Point> points, std::vector<double> values);

    std::size_t size() const { return values.size(); }
    bool is_lattice() const { return lattice.has_value(); }

    /// R with R^n = measure of the value support. Lattices count nonzero cells
    /// times h^n; scattered fields fall back to the bounding box of nonzero samples.
    double support_radius() const;

    /// Throws DomainError on length mismatch, non-finite values, or a lattice
    /// whose node count disagrees with the sample count.
    void validate() const;

    SampledField with_values(std::vector<double> v) const;
};

}  // namespace nlt
