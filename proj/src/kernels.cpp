#include "nlt/kernels.hpp"

#include <algorithm>
#include <random>

#include "nlt/quadrature.hpp"

namespace nlt {

namespace {

double unit_sphere_measure(int dim) { return dim == 2 ? 2.0 * kPi : 4.0 * kPi; }

void require_nonzero(const Point& x, int dim) {
    if (norm(x, dim) == 0.0) throw DomainError("kernel singular at origin");
}

Point random_direction(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        Point p{g(rng), g(rng), dim == 3 ? g(rng) : 0.0};
        const double r = norm(p, dim);
        if (r > 1e-3) return scaled(p, 1.0 / r);
    }
}

}  // namespace

std::vector<std::string> KernelSpec::builtin_names() {
    return {"biot-savart-2d", "grad-newtonian-2d", "grad-newtonian-3d", "qg-3d"};
}

KernelSpec KernelSpec::builtin(std::string_view name, double sign) {
    if (sign != 1.0 && sign != -1.0) throw DomainError("kernel_sign must be +1 or -1");
    KernelSpec k;
    k.name_ = std::string(name);
    k.sign_ = sign;
    k.parity_ = Parity::odd;
    Mat3 a{};
    if (name == "biot-savart-2d") {
        k.dim_ = 2;
        a = {0, -1, 0, 1, 0, 0, 0, 0, 0};
    } else if (name == "grad-newtonian-2d") {
        k.dim_ = 2;
        a = {1, 0, 0, 0, 1, 0, 0, 0, 0};
    } else if (name == "grad-newtonian-3d") {
        k.dim_ = 3;
        a = identity3();
    } else if (name == "qg-3d") {
        k.dim_ = 3;
        a = {0, -1, 0, 1, 0, 0, 0, 0, 0};
    } else {
        throw ConfigError("unknown kernel '" + std::string(name) + "'");
    }
    const double scale = sign / unit_sphere_measure(k.dim_);
    for (double& v : a) v *= scale;
    k.map_ = a;
    const int n = k.dim_;
    k.eval_ = [a, n](const Point& x) {
        const double r2 = dot(x, x, n);
        const double rn = n == 2 ? r2 : r2 * std::sqrt(r2);
        return scaled(apply(a, x, n), 1.0 / rn);
    };
    k.grad_ = [a, n](int i, int j, const Point& x) {
        // d_i (A x)_j / |x|^n = (A_ji - n (A x)_j x_i / |x|^2) / |x|^n
        const double r2 = dot(x, x, n);
        const double rn = n == 2 ? r2 : r2 * std::sqrt(r2);
        const Point ax = apply(a, x, n);
        return (at(a, j, i) - n * ax[j] * x[i] / r2) / rn;
    };
    return k;
}

KernelSpec KernelSpec::custom(std::string name, int dim, EvalFn eval, GradFn grad, Parity parity) {
    if (dim != 2 && dim != 3) throw DomainError("kernel dimension must be 2 or 3");
    if (!eval || !grad) throw DomainError("custom kernel needs both evaluators");
    KernelSpec k;
    k.name_ = std::move(name);
    k.dim_ = dim;
    k.parity_ = parity;
    k.eval_ = std::move(eval);
    k.grad_ = std::move(grad);

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> lam(0.25, 4.0);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const Point x = random_direction(dim, rng);
        const double l = lam(rng);
        const Point lx = scaled(x, l);
        const Point kx = k.eval_(x);
        const Point klx = k.eval_(lx);
        const double scale_k = std::max(norm(kx, dim), 1e-300);
        const double pk = std::pow(l, -(dim - 1));
        for (int d = 0; d < dim; ++d) worst = std::max(worst, std::abs(klx[d] - pk * kx[d]) / scale_k);
        const double pg = std::pow(l, -dim);
        double gscale = 1e-300;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) gscale = std::max(gscale, std::abs(k.grad_(i, j, x)));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                worst = std::max(worst, std::abs(k.grad_(i, j, lx) - pg * k.grad_(i, j, x)) / gscale);
    }
    if (worst > 1e-9)
        throw DomainError("kernel '" + k.name_ + "' is not homogeneous of degree -(n-1) (residual " +
                          std::to_string(worst) + ")");
    return k;
}

Point KernelSpec::eval(const Point& x) const {
    require_nonzero(x, dim_);
    return eval_(x);
}

double KernelSpec::grad_pv(int i, int j, const Point& x) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw DomainError("kernel derivative index out of range");
    require_nonzero(x, dim_);
    return grad_(i, j, x);
}

double DiracCorrectionMatrix::trace() const {
    double t = 0.0;
    for (int d = 0; d < dim; ++d) t += at(c, d, d);
    return t;
}

namespace {

Mat3 correction_at(const KernelSpec& kernel, int order) {
    const SphereRule rule = sphere_rule(kernel.dim(), order);
    const int n = kernel.dim();
    Mat3 c{};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Point& s = rule.nodes[q];
        const Point k = kernel.eval(s);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) at(c, i, j) += rule.weights[q] * k[j] * s[i];
    }
    return c;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
    double m = 0.0;
    for (int k = 0; k < 9; ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

DiracCorrectionMatrix dirac_correction(const KernelSpec& kernel, int quadrature_order) {
    if (quadrature_order < 4) throw DomainError("quadrature_order must be at least 4");
    DiracCorrectionMatrix out;
    out.dim = kernel.dim();
    out.quadrature_order = quadrature_order;
    out.c = correction_at(kernel, quadrature_order);
    const Mat3 coarse = correction_at(kernel, quadrature_order / 2);
    out.estimated_error = max_abs_diff(out.c, coarse);
    if (quadrature_order / 4 >= 2) {
        const Mat3 coarser = correction_at(kernel, quadrature_order / 4);
        const double previous = max_abs_diff(coarse, coarser);
        // roundoff floor: differences at machine precision carry no trend
        if (out.estimated_error > 1e-12 && out.estimated_error > previous)
            throw NumericalError("dirac_correction: refinement error grew from " +
                                 std::to_string(previous) + " to " +
                                 std::to_string(out.estimated_error));
    }
    return out;
}

SphericalMeanReport check_spherical_mean_zero(const KernelSpec& kernel, int i, int j,
                                              int quadrature_order, double tolerance) {
    auto mean_at = [&](int order) {
        const SphereRule rule = sphere_rule(kernel.dim(), order);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            s += rule.weights[q] * kernel.grad_pv(i, j, rule.nodes[q]);
        return s;
    };
    SphericalMeanReport r;
    r.i = i;
    r.j = j;
    const double fine = mean_at(quadrature_order);
    r.mean = std::abs(fine);
    r.error = std::abs(fine - mean_at(std::max(2, quadrature_order / 2)));
    r.passed = r.mean <= tolerance;
    return r;
}

KernelValidation validate_kernel(const KernelSpec& kernel, int quadrature_order, std::uint64_t seed,
                                 int samples) {
    const int n = kernel.dim();
    KernelValidation v;
    v.kernel = kernel.name();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_lambda(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> radius(0.5, 2.0);
    for (int s = 0; s < samples; ++s) {
        const Point x = scaled(random_direction(n, rng), radius(rng));
        const double l = std::exp(log_lambda(rng));
        const Point lx = scaled(x, l);
        const Point kx = kernel.eval(x);
        const Point klx = kernel.eval(lx);
        const double kscale = std::max(norm(kx, n), 1e-300);
        const double pk = std::pow(l, -(n - 1));
        for (int d = 0; d < n; ++d)
            v.homogeneity_residual = std::max(v.homogeneity_residual, std::abs(klx[d] - pk * kx[d]) / kscale);

        double gscale = 1e-300;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) gscale = std::max(gscale, std::abs(kernel.grad_pv(i, j, x)));
        const double pg = std::pow(l, -n);
        const double step = 1e-5;
        for (int i = 0; i < n; ++i) {
            Point xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            const Point kp = kernel.eval(xp);
            const Point km = kernel.eval(xm);
            for (int j = 0; j < n; ++j) {
                const double g = kernel.grad_pv(i, j, x);
                v.grad_homogeneity_residual = std::max(
                    v.grad_homogeneity_residual, std::abs(kernel.grad_pv(i, j, lx) - pg * g) / gscale);
                const double fd = (kp[j] - km[j]) / (2.0 * step);
                v.grad_fd_residual = std::max(v.grad_fd_residual, std::abs(fd - g) / gscale);
            }
        }
    }
    v.spherical_mean_residuals.assign(n, std::vector<double>(n, 0.0));
    bool means_ok = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto r = check_spherical_mean_zero(kernel, i, j, quadrature_order);
            v.spherical_mean_residuals[i][j] = r.mean;
            means_ok = means_ok && r.passed;
        }
    v.c = dirac_correction(kernel, quadrature_order);
    v.passed = v.homogeneity_residual <= 1e-12 && v.grad_homogeneity_residual <= 1e-12 &&
               v.grad_fd_residual <= 1e-6 && means_ok;
    return v;
}

}  // namespace nlt
