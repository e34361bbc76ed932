#include "nlt/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace nlt {

double smooth_cutoff(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    // 1 - (6 s^5 - 15 s^4 + 10 s^3)
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

std::vector<std::string> density_preset_names() {
    return {"gaussian", "mollified-disk", "ring", "cusp", "custom"};
}

namespace {

DensityProfile load_custom(int dim, const PresetParams& p) {
    if (p.csv_path.empty()) throw DomainError("custom density needs rho0_csv");
    if (!(p.csv_spacing > 0.0)) throw DomainError("custom density needs a positive rho0_csv_spacing");
    std::ifstream in(p.csv_path);
    if (!in) throw IoError("cannot open " + p.csv_path);
    const double h = p.csv_spacing;
    auto key = [h, dim](const Point& x) {
        std::array<long, 3> k{0, 0, 0};
        for (int d = 0; d < dim; ++d) k[d] = std::lround(x[d] / h);
        return k;
    };
    auto samples = std::make_shared<std::map<std::array<long, 3>, double>>();
    Point center{0, 0, 0};
    double weight = 0.0;
    std::vector<Point> support;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) continue;  // header
        if (static_cast<int>(row.size()) != dim + 1)
            throw DomainError("custom density rows need " + std::to_string(dim + 1) + " columns");
        Point x{0, 0, 0};
        for (int d = 0; d < dim; ++d) x[d] = row[d];
        const double v = row[dim];
        (*samples)[key(x)] = v;
        if (v != 0.0) {
            support.push_back(x);
            for (int d = 0; d < dim; ++d) center[d] += x[d];
            weight += 1.0;
        }
    }
    if (weight > 0.0)
        for (int d = 0; d < dim; ++d) center[d] /= weight;
    double radius = 0.0;
    for (const auto& x : support) radius = std::max(radius, norm(sub(x, center), dim));
    DensityProfile prof;
    prof.name = "custom";
    prof.dim = dim;
    prof.center = center;
    prof.support_radius = radius + h;
    prof.value = [samples, key, h, dim](const Point& x) {
        const auto k = key(x);
        for (int d = 0; d < dim; ++d)
            if (std::abs(x[d] - static_cast<double>(k[d]) * h) > 0.25 * h) return 0.0;
        const auto it = samples->find(k);
        return it == samples->end() ? 0.0 : it->second;
    };
    return prof;
}

}  // namespace

DensityProfile make_density(const std::string& preset, int dim, const PresetParams& p) {
    if (dim != 2 && dim != 3) throw DomainError("density dimension must be 2 or 3");
    DensityProfile prof;
    prof.name = preset;
    prof.dim = dim;
    prof.center = p.center;
    const Point c = p.center;
    const double a = p.amplitude;
    if (preset == "gaussian") {
        if (!(p.sigma > 0.0)) throw DomainError("gaussian sigma must be positive");
        const double s = p.sigma;
        prof.support_radius = 3.0 * s;
        prof.value = [=](const Point& x) {
            const double r = norm(sub(x, c), dim);
            return a * std::exp(-r * r / (2.0 * s * s)) * smooth_cutoff((r - 2.5 * s) / (0.5 * s));
        };
    } else if (preset == "mollified-disk") {
        if (!(p.radius > p.width && p.width > 0.0)) throw DomainError("mollified-disk needs radius > width > 0");
        const double R = p.radius, w = p.width;
        prof.support_radius = R;
        prof.value = [=](const Point& x) {
            const double r = norm(sub(x, c), dim);
            return a * smooth_cutoff((r - (R - w)) / w);
        };
    } else if (preset == "ring") {
        if (!(p.radius > 3.0 * p.width && p.width > 0.0)) throw DomainError("ring needs radius > 3 width > 0");
        const double R = p.radius, w = p.width;
        prof.support_radius = R + 3.0 * w;
        prof.value = [=](const Point& x) {
            const double d = std::abs(norm(sub(x, c), dim) - R);
            return a * std::exp(-d * d / (2.0 * w * w)) * smooth_cutoff((d - 2.5 * w) / (0.5 * w));
        };
    } else if (preset == "cusp") {
        if (!(p.radius > 0.0) || p.mollification < 0.0) throw DomainError("cusp needs radius > 0, mollification >= 0");
        const double R = p.radius, m = p.mollification;
        prof.support_radius = R;
        prof.value = [=](const Point& x) {
            const double r = norm(sub(x, c), dim);
            const double profile = 1.0 - (std::sqrt(r * r + m * m) - m) / R;
            return a * profile * smooth_cutoff((r - 0.5 * R) / (0.5 * R));
        };
    } else if (preset == "custom") {
        return load_custom(dim, p);
    } else {
        throw ConfigError("unknown rho0 preset '" + preset + "'");
    }
    return prof;
}

DensityProfile perturbed(const DensityProfile& base, const DensityProfile& phi, double eps) {
    DensityProfile out;
    out.name = base.name + "+eps*" + phi.name;
    out.dim = base.dim;
    // ball around base.center containing both supports
    const double offset = norm(sub(phi.center, base.center), base.dim);
    out.center = base.center;
    out.support_radius = eps == 0.0 ? base.support_radius
                                    : std::max(base.support_radius, offset + phi.support_radius);
    auto b = base.value;
    auto f = phi.value;
    out.value = [b, f, eps](const Point& x) { return eps == 0.0 ? b(x) : b(x) + eps * f(x); };
    return out;
}

}  // namespace nlt
