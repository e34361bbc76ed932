#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nlt/core.hpp"

namespace nlt {

/// Regular lattice aligned with h*Z^n. Node k along axis d sits at (lo[d] + k) * h,
/// so lattices symmetric about the origin have bit-symmetric coordinates.
/// Flat indices are row-major with axis 0 slowest.
struct LatticeGeometry {
    int dim = 2;
    double h = 1.0;
    std::array<long, 3> lo{0, 0, 0};
    std::array<long, 3> count{1, 1, 1};

    /// Lattice covering the closed box [lo_corner, hi_corner] (in physical units)
    /// expanded outward to the nearest multiple of h.
    static LatticeGeometry covering(int dim, double h, const Point& lo_corner, const Point& hi_corner,
                                    int margin_cells = 0);

    /// Lattice with nodes -half..half along every axis.
    static LatticeGeometry centered(int dim, double h, long half);

    std::size_t size() const {
        return static_cast<std::size_t>(count[0]) * static_cast<std::size_t>(count[1]) *
               static_cast<std::size_t>(count[2]);
    }

    std::array<long, 3> multi_index(std::size_t flat) const {
        std::array<long, 3> m{0, 0, 0};
        m[2] = static_cast<long>(flat % static_cast<std::size_t>(count[2]));
        flat /= static_cast<std::size_t>(count[2]);
        m[1] = static_cast<long>(flat % static_cast<std::size_t>(count[1]));
        m[0] = static_cast<long>(flat / static_cast<std::size_t>(count[1]));
        return m;
    }

    std::size_t flat_index(const std::array<long, 3>& m) const {
        return (static_cast<std::size_t>(m[0]) * static_cast<std::size_t>(count[1]) +
                static_cast<std::size_t>(m[1])) *
                   static_cast<std::size_t>(count[2]) +
               static_cast<std::size_t>(m[2]);
    }

    bool contains(const std::array<long, 3>& m) const {
        for (int d = 0; d < 3; ++d)
            if (m[d] < 0 || m[d] >= count[d]) return false;
        return true;
    }

    Point node(const std::array<long, 3>& m) const {
        Point p{0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) p[d] = static_cast<double>(lo[d] + m[d]) * h;
        return p;
    }

    Point node(std::size_t flat) const { return node(multi_index(flat)); }

    std::vector<Point> nodes() const;

    double cell_volume() const;
};

/// Neighbour offsets used for lattice stencils: the axes and diagonals, one
/// representative per +-pair ({-1,0,1}^n minus zero, modulo sign).
std::vector<std::array<long, 3>> stencil_directions(int dim);

}  // namespace nlt
