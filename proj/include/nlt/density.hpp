#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlt/core.hpp"

namespace nlt {

/// A compactly supported initial density rho_0, supported in B(center, support_radius).
struct DensityProfile {
    std::string name;
    int dim = 2;
    Point center{0.0, 0.0, 0.0};
    double support_radius = 1.0;
    std::function<double(const Point&)> value;

    double operator()(const Point& x) const { return value(x); }
};

struct PresetParams {
    double amplitude = 1.0;
    Point center{0.0, 0.0, 0.0};
    double sigma = 0.2;         // gaussian width
    double radius = 0.5;        // disk radius / cusp support / ring radius
    double width = 0.1;         // disk edge mollification / ring thickness
    double mollification = 0.05;  // cusp rounding (roughness knob)
    std::string csv_path;       // custom preset
    double csv_spacing = 0.0;   // lattice spacing of the custom samples
};

/// Quintic smoothstep: 1 for s <= 0, 0 for s >= 1, C^2 in between.
double smooth_cutoff(double s);

/// Presets: `gaussian`, `mollified-disk`, `ring`, `cusp`, `custom` (CSV samples
/// x_1..x_n,value on a lattice of spacing csv_spacing).
DensityProfile make_density(const std::string& preset, int dim, const PresetParams& p);

std::vector<std::string> density_preset_names();

/// rho0 + eps * phi; support is the union of both supports.
DensityProfile perturbed(const DensityProfile& base, const DensityProfile& phi, double eps);

}  // namespace nlt
