#pragma once

#include <vector>

#include "nlt/core.hpp"
#include "nlt/kernels.hpp"

namespace nlt::detail {

/// Source points with weights (structure of arrays). Zero-weight sources are
/// dropped at construction; the remaining order is the input order.
struct SourceSet {
    int dim = 2;
    std::vector<double> x, y, z, w;
    std::vector<std::size_t> origin;  // index into the caller's arrays

    SourceSet(int dim, const std::vector<Point>& pos, const std::vector<double>& weight);
    std::size_t size() const { return w.size(); }
};

/// sum_j w_j (t - s_j) / |t - s_j|^n over sources with |t - s_j| > 0.
Point newtonian_sum(const SourceSet& src, const Point& t);

/// sum_j w_j k(t - s_j) over sources with |t - s_j| > 0, for any kernel.
Point kernel_sum(const KernelSpec& kernel, const SourceSet& src, const Point& t);

/// Moments for the excised derivative kernel with Newtonian structure:
///   a0 = sum w / r^n,  b_mi = sum w y_m y_i / r^(n+2)   (y = t - s, r = |y| > radius)
/// for two excision radii at once.
struct PVMoments {
    double a0 = 0.0;
    double b[3][3] = {};
};
void newtonian_pv_moments(const SourceSet& src, const Point& t, double eps, PVMoments& at_eps,
                          PVMoments& at_2eps);

}  // namespace nlt::detail
