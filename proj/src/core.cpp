#include "nlt/core.hpp"

#include <cstdlib>
#include <string>

#include "nlt/lattice.hpp"
#include "nlt/parallel.hpp"

namespace nlt {

Mat3 inverse(const Mat3& m, int dim) {
    const double d = det(m, dim);
    if (d == 0.0 || !std::isfinite(d)) throw NumericalError("singular matrix");
    Mat3 r = identity3();
    if (dim == 1) {
        r[0] = 1.0 / m[0];
    } else if (dim == 2) {
        r[0] = m[4] / d;
        r[1] = -m[1] / d;
        r[3] = -m[3] / d;
        r[4] = m[0] / d;
    } else {
        r[0] = (m[4] * m[8] - m[5] * m[7]) / d;
        r[1] = (m[2] * m[7] - m[1] * m[8]) / d;
        r[2] = (m[1] * m[5] - m[2] * m[4]) / d;
        r[3] = (m[5] * m[6] - m[3] * m[8]) / d;
        r[4] = (m[0] * m[8] - m[2] * m[6]) / d;
        r[5] = (m[2] * m[3] - m[0] * m[5]) / d;
        r[6] = (m[3] * m[7] - m[4] * m[6]) / d;
        r[7] = (m[1] * m[6] - m[0] * m[7]) / d;
        r[8] = (m[0] * m[4] - m[1] * m[3]) / d;
    }
    return r;
}

Point apply(const Mat3& m, const Point& v, int dim) {
    Point r{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) r[i] += at(m, i, j) * v[j];
    return r;
}

int default_worker_count(int fallback) {
    if (const char* env = std::getenv("NLT_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
    }
    return fallback;
}

LatticeGeometry LatticeGeometry::covering(int dim, double h, const Point& lo_corner,
                                          const Point& hi_corner, int margin_cells) {
    if (dim < 1 || dim > 3) throw DomainError("lattice dimension must be 1, 2 or 3");
    if (!(h > 0.0)) throw DomainError("lattice spacing must be positive");
    LatticeGeometry g;
    g.dim = dim;
    g.h = h;
    for (int d = 0; d < dim; ++d) {
        const long a = static_cast<long>(std::floor(lo_corner[d] / h - 1e-9)) - margin_cells;
        const long b = static_cast<long>(std::ceil(hi_corner[d] / h + 1e-9)) + margin_cells;
        g.lo[d] = a;
        g.count[d] = b - a + 1;
    }
    return g;
}

LatticeGeometry LatticeGeometry::centered(int dim, double h, long half) {
    LatticeGeometry g;
    g.dim = dim;
    g.h = h;
    for (int d = 0; d < dim; ++d) {
        g.lo[d] = -half;
        g.count[d] = 2 * half + 1;
    }
    return g;
}

std::vector<Point> LatticeGeometry::nodes() const {
    std::vector<Point> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
    return out;
}

double LatticeGeometry::cell_volume() const { return std::pow(h, dim); }

std::vector<std::array<long, 3>> stencil_directions(int dim) {
    std::vector<std::array<long, 3>> dirs;
    const long z = dim >= 3 ? 1 : 0;
    const long y = dim >= 2 ? 1 : 0;
    for (long a = -1; a <= 1; ++a)
        for (long b = -y; b <= y; ++b)
            for (long c = -z; c <= z; ++c) {
                std::array<long, 3> d{a, b, c};
                // keep the lexicographically positive representative
                int first = 0;
                while (first < 3 && d[first] == 0) ++first;
                if (first == 3 || d[first] < 0) continue;
                dirs.push_back(d);
            }
    return dirs;
}

}  // namespace nlt
