#include "nlt/random_fields.hpp"

#include "nlt/density.hpp"

namespace nlt {

RandomField::RandomField(const Options& opts, std::mt19937_64& rng)
    : dim_(opts.dim), cutoff_(opts.cutoff_radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> width(0.15, 0.5);
    for (int m = 0; m < opts.fourier_modes; ++m) {
        Mode mode{};
        double k2 = 0.0;
        for (int d = 0; d < dim_; ++d) {
            mode.k[d] = 4.0 * u(rng);
            k2 += mode.k[d] * mode.k[d];
        }
        mode.amp = u(rng) / (1.0 + k2);
        mode.phase = phase(rng);
        modes_.push_back(mode);
    }
    for (int b = 0; b < opts.bumps; ++b) {
        Bump bump{};
        for (int d = 0; d < dim_; ++d) bump.c[d] = 0.8 * u(rng);
        bump.amp = u(rng);
        bump.width = width(rng);
        bumps_.push_back(bump);
    }
    if (opts.cusp) {
        has_cusp_ = true;
        for (int d = 0; d < dim_; ++d) cusp_center_[d] = 0.5 * u(rng);
        cusp_amp_ = 0.3 + 0.35 * (u(rng) + 1.0);
    }
}

double RandomField::operator()(const Point& x) const {
    double v = 0.0;
    for (const auto& m : modes_) v += m.amp * std::cos(dot(m.k, x, dim_) + m.phase);
    for (const auto& b : bumps_) {
        const Point y = sub(x, b.c);
        v += b.amp * std::exp(-dot(y, y, dim_) / (2.0 * b.width * b.width));
    }
    if (has_cusp_) v += cusp_amp_ * norm(sub(x, cusp_center_), dim_);
    const double r = norm(x, dim_);
    return v * smooth_cutoff((r - 0.6 * cutoff_) / (0.4 * cutoff_));
}

RandomDiffeomorphism::RandomDiffeomorphism(int dim, double strength, std::mt19937_64& rng, int modes)
    : dim_(dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> wn(1.0, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    double total = 0.0;
    for (int m = 0; m < modes; ++m) {
        Mode mode{};
        double an = 0.0, wnorm = 0.0;
        for (int d = 0; d < dim; ++d) {
            mode.amp[d] = g(rng);
            mode.w[d] = g(rng);
            an += mode.amp[d] * mode.amp[d];
            wnorm += mode.w[d] * mode.w[d];
        }
        const double wl = wn(rng) / std::sqrt(wnorm);
        for (int d = 0; d < dim; ++d) mode.w[d] *= wl;
        mode.phase = phase(rng);
        total += std::sqrt(an) * norm(mode.w, dim);
        modes_.push_back(mode);
    }
    const double s = total > 0.0 ? strength / total : 0.0;
    for (auto& m : modes_)
        for (int d = 0; d < dim; ++d) m.amp[d] *= s;
}

RandomDiffeomorphism RandomDiffeomorphism::identity(int dim) { return RandomDiffeomorphism(dim); }

Point RandomDiffeomorphism::operator()(const Point& a) const {
    Point x = a;
    for (const auto& m : modes_) {
        const double s = std::sin(dot(m.w, a, dim_) + m.phase);
        for (int d = 0; d < dim_; ++d) x[d] += m.amp[d] * s;
    }
    return x;
}

Mat3 RandomDiffeomorphism::jacobian(const Point& a) const {
    Mat3 J = identity3();
    for (const auto& m : modes_) {
        const double c = std::cos(dot(m.w, a, dim_) + m.phase);
        for (int r = 0; r < dim_; ++r)
            for (int col = 0; col < dim_; ++col) at(J, r, col) += m.amp[r] * m.w[col] * c;
    }
    return J;
}

double RandomDiffeomorphism::jacobian_bound() const {
    double b = 1.0;
    for (const auto& m : modes_) b += norm(m.amp, dim_) * norm(m.w, dim_);
    return b;
}

Point RandomDiffeomorphism::inverse(const Point& x) const {
    Point a = x;
    for (int it = 0; it < 60; ++it) {
        const Point r = sub((*this)(a), x);
        if (norm(r, dim_) < 1e-15) break;
        const Point step = apply(nlt::inverse(jacobian(a), dim_), r, dim_);
        for (int d = 0; d < dim_; ++d) a[d] -= step[d];
    }
    return a;
}

}  // namespace nlt
