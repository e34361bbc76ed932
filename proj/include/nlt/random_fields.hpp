#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nlt/core.hpp"

namespace nlt {

/// Smooth random test function on R^n: a finite Fourier series with decaying
/// coefficients plus Gaussian bumps, optionally with a cusp term a*|x - c|
/// (Zygmund but not C^1), all multiplied by a smooth compact cutoff.
class RandomField {
public:
    struct Options {
        int dim = 2;
        int fourier_modes = 6;
        int bumps = 3;
        bool cusp = false;
        double cutoff_radius = 1.6;
    };

    RandomField(const Options& opts, std::mt19937_64& rng);

    double operator()(const Point& x) const;

private:
    struct Mode {
        Point k;
        double amp, phase;
    };
    struct Bump {
        Point c;
        double amp, width;
    };
    int dim_;
    double cutoff_;
    std::vector<Mode> modes_;
    std::vector<Bump> bumps_;
    bool has_cusp_ = false;
    Point cusp_center_{};
    double cusp_amp_ = 0.0;
};

/// Random near-identity diffeomorphism X = e + phi with
/// phi(x) = sum_m a_m sin(w_m . x + p_m), scaled so that ||D phi|| <= `strength` < 1.
class RandomDiffeomorphism {
public:
    RandomDiffeomorphism(int dim, double strength, std::mt19937_64& rng, int modes = 3);

    static RandomDiffeomorphism identity(int dim);

    Point operator()(const Point& a) const;
    Mat3 jacobian(const Point& a) const;

    /// Analytic upper bound on sup_x ||DX(x)||_op (1 + sum |a_m| |w_m|).
    double jacobian_bound() const;

    /// Solves X(a) = x by Newton iteration from a = x.
    Point inverse(const Point& x) const;

    int dim() const { return dim_; }

private:
    explicit RandomDiffeomorphism(int dim) : dim_(dim) {}
    struct Mode {
        Point amp, w;
        double phase;
    };
    int dim_;
    std::vector<Mode> modes_;
};

}  // namespace nlt
