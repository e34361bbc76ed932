#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlt/density.hpp"
#include "nlt/flow.hpp"
#include "nlt/function_spaces.hpp"
#include "nlt/kernels.hpp"
#include "nlt/singular_integrals.hpp"

namespace nlt {

enum class NormKind { holder, zygmund };
NormKind parse_norm_kind(const std::string& s);
std::string to_string(NormKind k);

struct DensitySpec {
    std::string preset = "gaussian";
    PresetParams params{};

    DensityProfile build(int dim) const { return make_density(preset, dim, params); }
};

struct ContinuitySweepConfig {
    std::string kernel = "biot-savart-2d";
    double kernel_sign = 1.0;
    int dim = 2;
    DensitySpec base;
    DensitySpec perturbation;
    // Strictly decreasing; a trailing 0 is allowed and yields the zero row.
    std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    double gamma = 0.5;
    NormKind norm_kind = NormKind::holder;
    double h = 1.0 / 32;
    SolverConfig solver;
    // Shared comparison lattice: spacing and half extent (nodes cover [-L, L]^n).
    double eval_spacing = 1.0 / 24;
    double eval_half_extent = 0.8;
    Interpolation interpolation = Interpolation::inverse_map;
    std::uint64_t seed = 0;
    int workers = 1;

    /// Biot-Savart, radial Gaussian base, small off-centre bump, Holder distances.
    static ContinuitySweepConfig holder_default();
    /// Same flow with a mollified |x|-cusp base and Zygmund distances.
    static ContinuitySweepConfig zygmund_default();

    /// ConfigError listing every problem found.
    void validate() const;
};

struct SweepRow {
    double epsilon = 0.0;
    double input_distance = 0.0;
    double output_distance = 0.0;
    double flow_distance = 0.0;
    bool admissible_to_T = true;
};

struct SweepFit {
    double beta = 0.0;       // slope of log output_distance against log input_distance
    double r_squared = 0.0;
    double spearman = 0.0;   // rank correlation of flow_distance and output_distance
    int points = 0;
};

struct SweepReport {
    NormKind norm_kind = NormKind::holder;
    std::vector<SweepRow> rows;  // epsilon descending
    SweepFit fit;
    bool strictly_decreasing = false;  // output_distance over the positive-epsilon admissible rows
    bool base_admissible = true;
};

/// Runs the base problem and rho0 + eps phi for every eps on one marker lattice
/// and one comparison lattice, and fits the log-log exponent.
SweepReport continuity_sweep(const ContinuitySweepConfig& cfg);

/// continuity_sweep with Zygmund distances.
SweepReport zygmund_sweep(ContinuitySweepConfig cfg);

/// sup|f| + seminorm, with the seminorm chosen by `kind`.
double field_norm(const SampledField& f, NormKind kind, double gamma, const PairOptions& pairs = {});

/// sup|Y - X| + sup|DY - DX| + |DY - DX|_gamma over the label lattice.
double flow_distance(const FlowState& a, const FlowState& b, const MarkerLattice& lattice,
                     const PairOptions& pairs = {});

/// Least-squares slope, r^2 of log y against log x.
struct LogFit {
    double slope = 0.0;
    double r_squared = 0.0;
};
LogFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Convergence studies against exact solutions.

struct ConvergenceConfig {
    std::string case_name = "radial-euler-stationary";
    std::vector<double> h_list;   // empty: case default
    std::vector<double> dt_list;  // empty: case default
    double T = 1.0;
    Interpolation interpolation = Interpolation::inverse_map;
    int workers = 1;

    /// Fills empty lists with the defaults of the case.
    ConvergenceConfig resolved() const;
};

struct ConvergenceRow {
    std::string case_name;
    std::string quantity;
    double h = 0.0;
    double dt = 0.0;
    double error = 0.0;
};

struct ConvergenceReport {
    std::string case_name;
    std::string axis;  // "h" or "dt"
    std::vector<ConvergenceRow> rows;
    double observed_order = 0.0;   // log-log slope of error against the refined axis
    double required_order = 0.0;
    std::vector<double> fitted_rates;  // gradn-patch-exponential: radius growth rate per h
    bool monotone = false;
    bool passed = false;
};

/// `radial-euler-stationary`, `gradn-patch-exponential`, `qg-radial-stationary`,
/// `rk4-temporal`.
std::vector<std::string> convergence_case_names();
ConvergenceReport convergence_study(const ConvergenceConfig& cfg);

/// Mean |X| over markers on the plateau of rho0 (rho0 equal to its maximum).
double plateau_mean_radius(const FlowState& s, const MarkerLattice& lattice);

// ---------------------------------------------------------------------------
// Aggregate lemma checks.

struct LemmaSuiteOptions {
    std::uint64_t seed = 0;
    int trials = 200;
    int workers = 1;
};

struct DiracCheck {
    std::string kernel;
    DiracCorrectionMatrix c;
    double expected_trace = 0.0;
    bool passed = false;
};

struct SIOStability {
    SIOReport coarse;
    SIOReport fine;
    double max_constant = 0.0;
    double max_drift = 0.0;  // max over fields of max(c_fine / c_coarse, c_coarse / c_fine)
    bool passed = false;
};

struct LemmaSuiteReport {
    int trials = 0;
    std::uint64_t seed = 0;
    InequalityReport holder;
    InequalityReport zygmund;
    std::vector<DiracCheck> dirac;
    std::vector<SIOStability> sio;
    bool passed = true;
};

/// Holder and Zygmund inequality suites, Dirac corrections and the singular
/// integral constants on a coarse and a refined lattice. trials = 0 gives an
/// empty, passing report.
LemmaSuiteReport lemma_suite(const LemmaSuiteOptions& opts);

}  // namespace nlt
