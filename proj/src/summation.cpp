#include "summation.hpp"

#include <cmath>

namespace nlt::detail {

SourceSet::SourceSet(int d, const std::vector<Point>& pos, const std::vector<double>& weight) : dim(d) {
    for (std::size_t k = 0; k < pos.size(); ++k) {
        if (weight[k] == 0.0) continue;
        x.push_back(pos[k][0]);
        y.push_back(pos[k][1]);
        z.push_back(pos[k][2]);
        w.push_back(weight[k]);
        origin.push_back(k);
    }
}

// The reductions below are declared `omp simd`: lanes accumulate in a fixed
// strided order, so results depend only on the source order and the build,
// never on the number of worker threads.

Point newtonian_sum(const SourceSet& src, const Point& t) {
    const std::size_t m = src.size();
    const double* __restrict sx = src.x.data();
    const double* __restrict sy = src.y.data();
    const double* __restrict sz = src.z.data();
    const double* __restrict sw = src.w.data();
    double ax = 0.0, ay = 0.0, az = 0.0;
    if (src.dim == 2) {
        const double tx = t[0], ty = t[1];
#pragma omp simd reduction(+ : ax, ay)
        for (std::size_t j = 0; j < m; ++j) {
            const double dx = tx - sx[j], dy = ty - sy[j];
            const double r2 = dx * dx + dy * dy;
            const double d = r2 > 0.0 ? r2 : __builtin_inf();
            const double s = sw[j] / d;
            ax += s * dx;
            ay += s * dy;
        }
    } else {
        const double tx = t[0], ty = t[1], tz = t[2];
#pragma omp simd reduction(+ : ax, ay, az)
        for (std::size_t j = 0; j < m; ++j) {
            const double dx = tx - sx[j], dy = ty - sy[j], dz = tz - sz[j];
            const double r2 = dx * dx + dy * dy + dz * dz;
            const double r3 = r2 * std::sqrt(r2);
            const double d = r2 > 0.0 ? r3 : __builtin_inf();
            const double s = sw[j] / d;
            ax += s * dx;
            ay += s * dy;
            az += s * dz;
        }
    }
    return {ax, ay, az};
}

Point kernel_sum(const KernelSpec& kernel, const SourceSet& src, const Point& t) {
    if (const auto& map = kernel.newtonian_map()) return apply(*map, newtonian_sum(src, t), src.dim);
    Point acc{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < src.size(); ++j) {
        const Point y{t[0] - src.x[j], t[1] - src.y[j], t[2] - src.z[j]};
        if (norm(y, src.dim) == 0.0) continue;
        const Point k = kernel.eval(y);
        for (int d = 0; d < src.dim; ++d) acc[d] += src.w[j] * k[d];
    }
    return acc;
}

void newtonian_pv_moments(const SourceSet& src, const Point& t, double eps, PVMoments& e1, PVMoments& e2) {
    const std::size_t m = src.size();
    const double* __restrict sx = src.x.data();
    const double* __restrict sy = src.y.data();
    const double* __restrict sz = src.z.data();
    const double* __restrict sw = src.w.data();
    const double eps2 = eps * eps, eps2x = 4.0 * eps * eps;
    if (src.dim == 2) {
        double a = 0, bxx = 0, bxy = 0, byy = 0;
        double a2 = 0, bxx2 = 0, bxy2 = 0, byy2 = 0;
        const double tx = t[0], ty = t[1];
#pragma omp simd reduction(+ : a, bxx, bxy, byy, a2, bxx2, bxy2, byy2)
        for (std::size_t j = 0; j < m; ++j) {
            const double dx = tx - sx[j], dy = ty - sy[j];
            const double r2 = dx * dx + dy * dy;
            const double in1 = r2 > eps2 ? 1.0 : 0.0;
            const double in2 = r2 > eps2x ? 1.0 : 0.0;
            const double safe = r2 > 0.0 ? r2 : 1.0;
            const double w0 = sw[j] / safe;    // w / r^2
            const double w2 = w0 / safe;       // w / r^4
            a += in1 * w0;
            a2 += in2 * w0;
            const double xx = w2 * dx * dx, xy = w2 * dx * dy, yy = w2 * dy * dy;
            bxx += in1 * xx;
            bxy += in1 * xy;
            byy += in1 * yy;
            bxx2 += in2 * xx;
            bxy2 += in2 * xy;
            byy2 += in2 * yy;
        }
        e1 = {};
        e2 = {};
        e1.a0 = a;
        e1.b[0][0] = bxx;
        e1.b[0][1] = e1.b[1][0] = bxy;
        e1.b[1][1] = byy;
        e2.a0 = a2;
        e2.b[0][0] = bxx2;
        e2.b[0][1] = e2.b[1][0] = bxy2;
        e2.b[1][1] = byy2;
        return;
    }
    double a = 0, bxx = 0, bxy = 0, bxz = 0, byy = 0, byz = 0, bzz = 0;
    double a2 = 0, bxx2 = 0, bxy2 = 0, bxz2 = 0, byy2 = 0, byz2 = 0, bzz2 = 0;
    const double tx = t[0], ty = t[1], tz = t[2];
#pragma omp simd reduction(+ : a, bxx, bxy, bxz, byy, byz, bzz, a2, bxx2, bxy2, bxz2, byy2, byz2, bzz2)
    for (std::size_t j = 0; j < m; ++j) {
        const double dx = tx - sx[j], dy = ty - sy[j], dz = tz - sz[j];
        const double r2 = dx * dx + dy * dy + dz * dz;
        const double in1 = r2 > eps2 ? 1.0 : 0.0;
        const double in2 = r2 > eps2x ? 1.0 : 0.0;
        const double safe = r2 > 0.0 ? r2 : 1.0;
        const double w0 = sw[j] / (safe * std::sqrt(safe));  // w / r^3
        const double w2 = w0 / safe;                        // w / r^5
        a += in1 * w0;
        a2 += in2 * w0;
        const double xx = w2 * dx * dx, xy = w2 * dx * dy, xz = w2 * dx * dz;
        const double yy = w2 * dy * dy, yz = w2 * dy * dz, zz = w2 * dz * dz;
        bxx += in1 * xx;
        bxy += in1 * xy;
        bxz += in1 * xz;
        byy += in1 * yy;
        byz += in1 * yz;
        bzz += in1 * zz;
        bxx2 += in2 * xx;
        bxy2 += in2 * xy;
        bxz2 += in2 * xz;
        byy2 += in2 * yy;
        byz2 += in2 * yz;
        bzz2 += in2 * zz;
    }
    auto fill = [](PVMoments& e, double a0, double xx, double xy, double xz, double yy, double yz, double zz) {
        e = {};
        e.a0 = a0;
        e.b[0][0] = xx;
        e.b[0][1] = e.b[1][0] = xy;
        e.b[0][2] = e.b[2][0] = xz;
        e.b[1][1] = yy;
        e.b[1][2] = e.b[2][1] = yz;
        e.b[2][2] = zz;
    };
    fill(e1, a, bxx, bxy, bxz, byy, byz, bzz);
    fill(e2, a2, bxx2, bxy2, bxz2, byy2, byz2, bzz2);
}

}  // namespace nlt::detail
