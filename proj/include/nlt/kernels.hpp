#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlt/core.hpp"

namespace nlt {

enum class Parity { odd, even, none };

/// A kernel k : R^n \ {0} -> R^n homogeneous of degree -(n-1), with its
/// pointwise derivative kernel d_i k_j (homogeneous of degree -n).
///
/// Built-ins all have the form k(x) = s * A x / (w_n |x|^n), with s the sign,
/// w_n = 2 pi (n = 2) or 4 pi (n = 3), and A a fixed matrix (identity for grad N,
/// the quarter turn for Biot-Savart, L(x) = (-x2, x1, 0) for QG). That linear
/// structure is exposed through newtonian_map() so summation loops can
/// accumulate sum w y / |y|^n once and apply A afterwards.
class KernelSpec {
public:
    using EvalFn = std::function<Point(const Point&)>;
    using GradFn = std::function<double(int i, int j, const Point&)>;

    /// `biot-savart-2d`, `grad-newtonian-2d`, `grad-newtonian-3d`, `qg-3d`.
    static KernelSpec builtin(std::string_view name, double sign = 1.0);

    /// Registers a user kernel. Homogeneity of both evaluators is sampled at
    /// registration; a residual above 1e-9 (relative) raises DomainError.
    static KernelSpec custom(std::string name, int dim, EvalFn eval, GradFn grad,
                             Parity parity = Parity::none);

    static std::vector<std::string> builtin_names();

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    Parity parity() const { return parity_; }
    double sign() const { return sign_; }

    /// k(x); DomainError when |x| = 0.
    Point eval(const Point& x) const;

    /// d_i k_j(x), 0-based i, j; DomainError when |x| = 0 or an index is out of range.
    double grad_pv(int i, int j, const Point& x) const;

    /// s * A / w_n for built-ins; empty for user kernels.
    const std::optional<Mat3>& newtonian_map() const { return map_; }

private:
    std::string name_;
    int dim_ = 2;
    Parity parity_ = Parity::none;
    double sign_ = 1.0;
    std::optional<Mat3> map_;
    EvalFn eval_;
    GradFn grad_;
};

/// c_ij = integral over the unit sphere of k_j(s) s_i dsigma(s).
struct DiracCorrectionMatrix {
    int dim = 2;
    Mat3 c{};
    int quadrature_order = 0;
    double estimated_error = 0.0;

    double operator()(int i, int j) const { return at(c, i, j); }
    double trace() const;
};

/// Evaluates c at `order` and at order/2; the entrywise max difference is the
/// error estimate. A third level (order/4) guards against divergent refinement.
DiracCorrectionMatrix dirac_correction(const KernelSpec& kernel, int quadrature_order);

struct SphericalMeanReport {
    int i = 0;
    int j = 0;
    double mean = 0.0;  // |integral of d_i k_j over the unit sphere|
    double error = 0.0;  // change against order/2
    bool passed = false;
};

SphericalMeanReport check_spherical_mean_zero(const KernelSpec& kernel, int i, int j,
                                              int quadrature_order, double tolerance = 1e-8);

/// Everything the `validate-kernels` command reports for one kernel.
struct KernelValidation {
    std::string kernel;
    double homogeneity_residual = 0.0;       // max relative, over random (x, lambda)
    double grad_homogeneity_residual = 0.0;
    double grad_fd_residual = 0.0;           // max relative, central differences at step 1e-5
    std::vector<std::vector<double>> spherical_mean_residuals;
    DiracCorrectionMatrix c;
    bool passed = false;
};

KernelValidation validate_kernel(const KernelSpec& kernel, int quadrature_order = 256,
                                 std::uint64_t seed = 0, int samples = 100);

}  // namespace nlt
