#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlt/sampled_field.hpp"

namespace nlt {

/// Controls how many pairs enter a Holder quotient maximum.
///
/// Fields with at most `pair_budget` points are evaluated over all pairs, which
/// makes the result the exact discrete supremum. Larger fields keep every pair
/// closer than `near_factor` spacings plus each point's nearest neighbour, and
/// add a stratified random sample of far pairs binned by log-distance.
struct PairOptions {
    std::size_t pair_budget = 2000;
    double near_factor = 4.0;
    std::size_t far_samples_per_bin = 4096;
    int far_bins = 16;
    std::uint64_t seed = 0;
    int workers = 1;
};

double sup_norm(const SampledField& f);

/// max over evaluated pairs of |f(x) - f(y)| / |x - y|^gamma; requires 0 < gamma < 1.
double holder_seminorm(const SampledField& f, double gamma, const PairOptions& opts = {});

/// Holder seminorm of several components sharing one point set; returns the
/// componentwise maximum (the vector-valued seminorm).
double holder_seminorm_multi(int dim, std::span<const Point> points,
                             const std::optional<LatticeGeometry>& lattice,
                             std::span<const std::vector<double>> components, double gamma,
                             const PairOptions& opts = {});

/// max over lattice stencils (x - H, x, x + H), H = m * h * d with d an axis or
/// diagonal direction, of |f(x+H) - 2 f(x) + f(x-H)| / |H|.
double zygmund_seminorm(const SampledField& f);

struct ModulusPoint {
    double h = 0.0;
    double omega = 0.0;
};

/// omega(h) = sup of the gamma-quotient over evaluated pairs with |x - y| < h.
std::vector<ModulusPoint> vanishing_modulus(const SampledField& f, double gamma,
                                            std::vector<double> h_levels,
                                            const PairOptions& opts = {});

/// Zygmund analogue: sup of second-difference ratios over stencils with |H| < delta.
std::vector<ModulusPoint> zygmund_modulus(const SampledField& f, std::vector<double> delta_levels);

struct NormReport {
    double gamma = 0.5;
    double sup_norm = 0.0;
    double holder_seminorm = 0.0;
    std::optional<double> zygmund_seminorm;
    std::vector<ModulusPoint> vanishing_modulus;
    std::vector<ModulusPoint> zygmund_modulus;
    double spacing = 0.0;  // lattice spacing, or median nearest-neighbour distance
};

NormReport norm_report(const SampledField& f, double gamma, const std::vector<double>& h_levels,
                       const PairOptions& opts = {});

/// Dyadic levels h0, h0/2, ..., h0/2^(count-1).
std::vector<double> dyadic_levels(double h0, int count);

/// Median nearest-neighbour distance (the lattice spacing for lattice fields).
double typical_spacing(const SampledField& f);

// ---------------------------------------------------------------------------
// Empirical checks of the Holder / Zygmund product and composition inequalities.

struct InequalityRecord {
    std::string name;
    int trial = 0;
    std::uint64_t seed = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool passed = true;
};

struct InequalitySummary {
    std::string name;
    bool constant_free = true;
    int checks = 0;
    int failures = 0;
    double max_ratio = 0.0;
    double worst_slack = 0.0;       // min of rhs - lhs (constant-free inequalities)
    double max_ratio_refined = 0.0;  // constant-bearing: same trials on the refined lattice
    std::uint64_t worst_seed = 0;
    bool passed = true;
};

struct InequalityReport {
    std::vector<InequalityRecord> records;
    std::vector<InequalitySummary> summaries;
    bool passed = true;
};

struct HolderSuiteOptions {
    int trials = 200;
    double gamma = 0.5;
    std::uint64_t seed = 0;
    long half_width = 12;  // lattice -half..half on [-1, 1]^2
    double tolerance = 1e-9;
    double ratio_bound = 10.0;
};

/// Constant-free: seminorm_product, norm_product, seminorm_composition, norm_composition (asserted within `tolerance`).
/// Constant-bearing: inverse_composition (ratio recorded, bounded by `ratio_bound`).
InequalityReport verify_holder_inequalities(const HolderSuiteOptions& opts);

struct ZygmundSuiteOptions {
    int trials = 200;
    double gamma = 0.5;
    std::uint64_t seed = 0;
    long half_width = 16;
    double ratio_bound = 10.0;
    double refinement_factor = 2.0;  // allowed ratio drift between lattices
};

/// Records ||fg||_* / (||f||_* ||g||_*) and |f o X|_* / (|f|_* (1 + ||X||_{1,gamma}))
/// on a lattice and on its refinement; fails when a ratio exceeds `ratio_bound`
/// or drifts by more than `refinement_factor` between the two.
InequalityReport verify_zygmund_inequalities(const ZygmundSuiteOptions& opts);

}  // namespace nlt
