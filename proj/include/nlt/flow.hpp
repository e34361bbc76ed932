#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlt/density.hpp"
#include "nlt/function_spaces.hpp"
#include "nlt/kernels.hpp"
#include "nlt/lattice.hpp"
#include "nlt/sampled_field.hpp"
#include "nlt/singular_integrals.hpp"

namespace nlt {

/// Labelled marker lattice alpha with initial densities rho0(alpha).
/// The lattice covers supp(rho0) with a margin of at least two zero cells.
struct MarkerLattice {
    LatticeGeometry geom;
    std::vector<double> rho0;
    double gamma = 0.5;

    static MarkerLattice from_profile(const DensityProfile& profile, double h, double gamma,
                                      int margin_cells = 2);
    static MarkerLattice from_values(const LatticeGeometry& geom, std::vector<double> rho0,
                                     double gamma);

    int dim() const { return geom.dim; }
    std::size_t size() const { return rho0.size(); }
    std::vector<Point> labels() const { return geom.nodes(); }
    /// DomainError unless the outermost two layers of rho0 vanish.
    void validate() const;
};

struct FlowState {
    double t = 0.0;
    std::vector<Point> X;
    std::vector<Mat3> DX;
    std::vector<double> detDX;
    double min_detDX = 1.0;
    double phi_norm = 0.0;
    double delta = 0.45;
    bool admissible = true;
};

enum class Integrator { rk4, picard };
Integrator parse_integrator(const std::string& s);
std::string to_string(Integrator i);

enum class Interpolation { idw, inverse_map };
Interpolation parse_interpolation(const std::string& s);
std::string to_string(Interpolation i);

struct SolverConfig {
    Integrator integrator = Integrator::rk4;
    double dt = 1e-3;
    double T = 1.0;
    double picard_tol = 1e-12;
    int picard_max_iter = 50;
    double picard_damping = 1.0;
    double delta = 0.45;
    SingularCellRule singular_cell_rule = SingularCellRule::exclude;
    int workers = 1;
    std::vector<double> checkpoint_times;
    bool store_replay = false;  // keep per-step Lagrangian velocities for invert_flow_check
    // Pair sampling for the |D phi|_gamma monitor. Near pairs dominate for smooth
    // flows, so far pairs are sampled more sparsely than the PairOptions default.
    PairOptions phi_pairs{2000, 4.0, 512, 16, 0, 1};
};

/// Centred differences in label space, second-order one-sided at the lattice faces.
void deformation_gradient(const std::vector<Point>& X, const LatticeGeometry& geom,
                          std::vector<Mat3>& DX, std::vector<double>& detDX, int workers = 1);

/// Discrete ||X - e||_{1,gamma}: sup|phi| + sup|D phi| + |D phi|_gamma
/// (componentwise maxima, seminorm over label pairs).
double phi_norm(const FlowState& state, const MarkerLattice& lattice, const PairOptions& pairs);

/// Refreshes DX, detDX, min_detDX, phi_norm and the admissibility flag.
void refresh_monitors(FlowState& state, const MarkerLattice& lattice, const SolverConfig& cfg);

/// X = alpha, DX = I, detDX = 1.
FlowState initial_state(const MarkerLattice& lattice, double delta = 0.45);

/// F_j(X)(alpha) = sum_{alpha'} k_j(X(alpha) - X(alpha')) rho0(alpha') detDX(alpha') h^n.
/// `targets` defaults to the marker positions themselves; arbitrary points are
/// allowed and use the same self-cell rule when they coincide with a marker.
std::vector<Point> velocity_from_state(const FlowState& state, const MarkerLattice& lattice,
                                       const KernelSpec& kernel,
                                       const std::vector<Point>* targets = nullptr,
                                       SingularCellRule rule = SingularCellRule::exclude,
                                       int workers = 1);

FlowState step_rk4(const FlowState& state, const MarkerLattice& lattice, const KernelSpec& kernel,
                   double dt, const SolverConfig& cfg,
                   std::vector<Point>* start_velocity = nullptr);

struct PicardStep {
    FlowState state;
    int iterations = 0;
    std::vector<double> residuals;
};

/// Thrown when the trapezoidal fixed-point iteration fails to contract.
class PicardRejection : public NumericalError {
public:
    PicardRejection(const std::string& what, std::vector<double> residuals)
        : NumericalError(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Trapezoidal step X+ = X + dt/2 (F(X) + F(X+)) solved by damped fixed-point
/// iteration from the explicit Euler predictor.
PicardStep step_picard(const FlowState& state, const MarkerLattice& lattice,
                       const KernelSpec& kernel, double dt, const SolverConfig& cfg);

struct StepMonitor {
    int step = 0;
    double t = 0.0;
    double min_detDX = 1.0;
    double phi_norm = 0.0;
    double max_speed = 0.0;
    int picard_iterations = 0;
};

struct Snapshot {
    int step = 0;
    double requested_t = 0.0;
    FlowState state;
};

struct TrajectoryRecord {
    std::vector<StepMonitor> monitors;
    std::vector<Snapshot> snapshots;
    FlowState final_state;
    double dt = 0.0;
    std::string halt_reason = "completed";
    bool completed = true;
    // Lagrangian velocity u(alpha, t_k) at every step time; filled when store_replay is set.
    std::vector<std::vector<Point>> replay_velocity;
};

/// Advances to T (round(T/dt) steps) or to the first state outside U_delta.
/// Checkpoints are taken at the nearest step; t = 0 is always snapshotted.
TrajectoryRecord simulate(const MarkerLattice& lattice, const KernelSpec& kernel,
                          const SolverConfig& cfg);

/// rho(p, t) from the transport identity rho(X(alpha, t), t) = rho0(alpha).
/// `idw`: inverse-distance weights over the 2^n nearest markers.
/// `inverse_map`: solves X~(alpha) = p for the multilinear interpolant X~ of the
/// flow map and returns the multilinear interpolant of rho0 at alpha.
/// Both return rho0(alpha) unchanged at marker positions and 0 away from the cloud.
SampledField reconstruct_density(const FlowState& state, const MarkerLattice& lattice,
                                 const std::vector<Point>& eval_points,
                                 Interpolation method = Interpolation::idw,
                                 const std::optional<LatticeGeometry>& eval_lattice = std::nullopt);

struct RoundTripReport {
    double max_error = 0.0;  // ||X_back(0) - alpha||_inf
    int steps = 0;
};

enum class ReplayInterpolation { linear, cubic };

/// Integrates dY/ds = -u(alpha, T - s) backwards from the final positions using
/// the stored Lagrangian velocities (RK4, velocities interpolated in time).
RoundTripReport invert_flow_check(const TrajectoryRecord& record, const MarkerLattice& lattice,
                                  ReplayInterpolation interp = ReplayInterpolation::cubic);

}  // namespace nlt
