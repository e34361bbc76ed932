#include "nlt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlt/parallel.hpp"
#include "spatial_index.hpp"
#include "summation.hpp"

namespace nlt {

// ---------------------------------------------------------------------------
// Marker lattice

MarkerLattice MarkerLattice::from_profile(const DensityProfile& profile, double h, double gamma, int margin_cells) {
    if (!(h > 0.0)) throw DomainError("marker spacing h must be positive");
    if (margin_cells < 2) throw DomainError("marker lattice margin must be at least 2 cells");
    Point lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < profile.dim; ++d) {
        lo[d] = profile.center[d] - profile.support_radius;
        hi[d] = profile.center[d] + profile.support_radius;
    }
    const auto geom = LatticeGeometry::covering(profile.dim, h, lo, hi, margin_cells);
    std::vector<double> rho(geom.size());
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = profile(geom.node(k));
    return from_values(geom, std::move(rho), gamma);
}

MarkerLattice MarkerLattice::from_values(const LatticeGeometry& geom, std::vector<double> rho0, double gamma) {
    MarkerLattice m;
    m.geom = geom;
    m.rho0 = std::move(rho0);
    m.gamma = gamma;
    m.validate();
    return m;
}

void MarkerLattice::validate() const {
    if (geom.dim != 2 && geom.dim != 3) throw DomainError("marker lattice dimension must be 2 or 3");
    if (rho0.size() != geom.size()) throw DomainError("rho0 size does not match the marker lattice");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in the open interval (0, 1)");
    for (std::size_t k = 0; k < rho0.size(); ++k) {
        if (!std::isfinite(rho0[k])) throw DomainError("rho0 contains non-finite values");
        if (rho0[k] == 0.0) continue;
        const auto m = geom.multi_index(k);
        for (int d = 0; d < geom.dim; ++d)
            if (m[d] < 2 || m[d] >= geom.count[d] - 2)
                throw DomainError("rho0 must vanish on the two outermost lattice layers");
    }
}

Integrator parse_integrator(const std::string& s) {
    if (s == "rk4") return Integrator::rk4;
    if (s == "picard") return Integrator::picard;
    throw ConfigError("integrator must be rk4 or picard, got '" + s + "'");
}

std::string to_string(Integrator i) { return i == Integrator::rk4 ? "rk4" : "picard"; }

Interpolation parse_interpolation(const std::string& s) {
    if (s == "idw") return Interpolation::idw;
    if (s == "inverse-map" || s == "inverse_map") return Interpolation::inverse_map;
    throw ConfigError("interpolation must be idw or inverse-map, got '" + s + "'");
}

std::string to_string(Interpolation i) { return i == Interpolation::idw ? "idw" : "inverse-map"; }

// ---------------------------------------------------------------------------
// Deformation gradient and monitors

void deformation_gradient(const std::vector<Point>& X, const LatticeGeometry& g, std::vector<Mat3>& DX,
                          std::vector<double>& detDX, int workers) {
    const std::size_t n = g.size();
    if (X.size() != n) throw DomainError("deformation_gradient: position count does not match the lattice");
    DX.assign(n, Mat3{});
    detDX.assign(n, 1.0);
    const int dim = g.dim;
    const double inv2h = 1.0 / (2.0 * g.h);
    parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const auto m = g.multi_index(k);
            Mat3 J{};
            for (int d = 0; d < dim; ++d) {
                auto shifted = [&](long s) {
                    auto q = m;
                    q[d] += s;
                    return X[g.flat_index(q)];
                };
                Point col{0, 0, 0};
                if (g.count[d] < 3) throw DomainError("deformation_gradient: need 3 nodes per axis");
                if (m[d] == 0) {
                    const Point a = X[k], p1 = shifted(1), p2 = shifted(2);
                    for (int c = 0; c < dim; ++c) col[c] = (-3.0 * a[c] + 4.0 * p1[c] - p2[c]) * inv2h;
                } else if (m[d] == g.count[d] - 1) {
                    const Point a = X[k], m1 = shifted(-1), m2 = shifted(-2);
                    for (int c = 0; c < dim; ++c) col[c] = (3.0 * a[c] - 4.0 * m1[c] + m2[c]) * inv2h;
                } else {
                    const Point p1 = shifted(1), m1 = shifted(-1);
                    for (int c = 0; c < dim; ++c) col[c] = (p1[c] - m1[c]) * inv2h;
                }
                for (int c = 0; c < dim; ++c) at(J, c, d) = col[c];
            }
            DX[k] = J;
            detDX[k] = det(J, dim);
        }
    });
}

double phi_norm(const FlowState& s, const MarkerLattice& lat, const PairOptions& pairs) {
    const int dim = lat.dim();
    const auto labels = lat.labels();
    double sup_phi = 0.0, sup_dphi = 0.0;
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(dim * dim), std::vector<double>(lat.size()));
    for (std::size_t k = 0; k < lat.size(); ++k) {
        for (int c = 0; c < dim; ++c) sup_phi = std::max(sup_phi, std::abs(s.X[k][c] - labels[k][c]));
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                const double v = at(s.DX[k], r, c) - (r == c ? 1.0 : 0.0);
                comps[static_cast<std::size_t>(r * dim + c)][k] = v;
                sup_dphi = std::max(sup_dphi, std::abs(v));
            }
    }
    const double semi = holder_seminorm_multi(dim, labels, lat.geom, comps, lat.gamma, pairs);
    return sup_phi + sup_dphi + semi;
}

void refresh_monitors(FlowState& s, const MarkerLattice& lat, const SolverConfig& cfg) {
    deformation_gradient(s.X, lat.geom, s.DX, s.detDX, cfg.workers);
    s.min_detDX = *std::min_element(s.detDX.begin(), s.detDX.end());
    PairOptions po = cfg.phi_pairs;
    po.workers = cfg.workers;
    s.phi_norm = phi_norm(s, lat, po);
    s.delta = cfg.delta;
    s.admissible = s.min_detDX > 0.5 && s.phi_norm < cfg.delta && std::isfinite(s.phi_norm);
}

FlowState initial_state(const MarkerLattice& lat, double delta) {
    lat.validate();
    FlowState s;
    s.X = lat.labels();
    s.DX.assign(lat.size(), identity3());
    s.detDX.assign(lat.size(), 1.0);
    s.min_detDX = 1.0;
    s.phi_norm = 0.0;
    s.delta = delta;
    s.admissible = true;
    return s;
}

// ---------------------------------------------------------------------------
// Velocity

namespace {

std::vector<Point> velocity_at(const std::vector<Point>& X, const std::vector<double>& detDX,
                               const std::vector<Mat3>* DX, const MarkerLattice& lat, const KernelSpec& kernel,
                               const std::vector<Point>& targets, bool targets_are_markers, SingularCellRule rule,
                               int workers) {
    const int dim = lat.dim();
    const double vol = lat.geom.cell_volume();
    std::vector<double> w(lat.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = lat.rho0[k] * detDX[k] * vol;
    const detail::SourceSet src(dim, X, w);
    std::vector<Point> out(targets.size(), Point{0, 0, 0});
    if (src.size() == 0) return out;
    const bool polar = rule == SingularCellRule::polar_correct && targets_are_markers && DX != nullptr;
    parallel_for(targets.size(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            Point v = detail::kernel_sum(kernel, src, targets[t]);
            if (polar && lat.rho0[t] != 0.0) {
                Mat3 cell{};
                for (int r = 0; r < dim; ++r)
                    for (int c = 0; c < dim; ++c) at(cell, r, c) = lat.geom.h * at((*DX)[t], r, c);
                const Point ci = polar_cell_integral(kernel, {0, 0, 0}, cell);
                for (int d = 0; d < dim; ++d) v[d] += lat.rho0[t] * ci[d];
            }
            out[t] = v;
        }
    });
    return out;
}

void require_finite(const std::vector<Point>& X) {
    for (const auto& p : X)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
            throw NumericalError("poisoned state: non-finite marker position");
}

// Velocity at the markers for arbitrary positions Y (stage states of a step).
std::vector<Point> stage_velocity(const std::vector<Point>& Y, const MarkerLattice& lat, const KernelSpec& kernel,
                                  const SolverConfig& cfg) {
    require_finite(Y);
    std::vector<Mat3> DX;
    std::vector<double> det;
    deformation_gradient(Y, lat.geom, DX, det, cfg.workers);
    return velocity_at(Y, det, &DX, lat, kernel, Y, true, cfg.singular_cell_rule, cfg.workers);
}

std::vector<Point> axpy(const std::vector<Point>& X, double a, const std::vector<Point>& V) {
    std::vector<Point> out(X.size());
    for (std::size_t k = 0; k < X.size(); ++k)
        out[k] = {X[k][0] + a * V[k][0], X[k][1] + a * V[k][1], X[k][2] + a * V[k][2]};
    return out;
}

double max_speed(const std::vector<Point>& V, int dim) {
    double s = 0.0;
    for (const auto& v : V) s = std::max(s, norm(v, dim));
    return s;
}

}  // namespace

std::vector<Point> velocity_from_state(const FlowState& state, const MarkerLattice& lat, const KernelSpec& kernel,
                                       const std::vector<Point>* targets, SingularCellRule rule, int workers) {
    if (kernel.dim() != lat.dim()) throw DomainError("kernel and marker lattice dimensions differ");
    require_finite(state.X);
    if (!state.admissible) throw NumericalError("velocity requested for a state outside U_delta");
    if (targets == nullptr)
        return velocity_at(state.X, state.detDX, &state.DX, lat, kernel, state.X, true, rule, workers);
    return velocity_at(state.X, state.detDX, nullptr, lat, kernel, *targets, false, rule, workers);
}

// ---------------------------------------------------------------------------
// Steppers

FlowState step_rk4(const FlowState& s, const MarkerLattice& lat, const KernelSpec& kernel, double dt,
                   const SolverConfig& cfg, std::vector<Point>* start_velocity) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!s.admissible) throw NumericalError("step requested for a state outside U_delta");
    require_finite(s.X);
    const auto k1 = velocity_at(s.X, s.detDX, &s.DX, lat, kernel, s.X, true, cfg.singular_cell_rule, cfg.workers);
    const auto k2 = stage_velocity(axpy(s.X, 0.5 * dt, k1), lat, kernel, cfg);
    const auto k3 = stage_velocity(axpy(s.X, 0.5 * dt, k2), lat, kernel, cfg);
    const auto k4 = stage_velocity(axpy(s.X, dt, k3), lat, kernel, cfg);
    FlowState out;
    out.X.resize(s.X.size());
    const double c = dt / 6.0;
    for (std::size_t k = 0; k < s.X.size(); ++k)
        for (int d = 0; d < 3; ++d)
            out.X[k][d] = s.X[k][d] + c * (k1[k][d] + 2.0 * k2[k][d] + 2.0 * k3[k][d] + k4[k][d]);
    out.t = s.t + dt;
    refresh_monitors(out, lat, cfg);
    if (start_velocity) *start_velocity = k1;
    return out;
}

PicardStep step_picard(const FlowState& s, const MarkerLattice& lat, const KernelSpec& kernel, double dt,
                       const SolverConfig& cfg) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!(cfg.picard_damping > 0.0 && cfg.picard_damping <= 1.0))
        throw DomainError("picard_damping must lie in (0, 1]");
    if (!s.admissible) throw NumericalError("step requested for a state outside U_delta");
    require_finite(s.X);
    const auto f0 = velocity_at(s.X, s.detDX, &s.DX, lat, kernel, s.X, true, cfg.singular_cell_rule, cfg.workers);
    const double th = cfg.picard_damping;
    std::vector<Point> Y = axpy(s.X, dt, f0);  // explicit Euler predictor
    PicardStep res;
    for (int it = 1; it <= cfg.picard_max_iter; ++it) {
        std::vector<Point> fy;
        try {
            fy = stage_velocity(Y, lat, kernel, cfg);
        } catch (const NumericalError&) {
            throw PicardRejection("Picard iteration produced non-finite positions; reduce dt", res.residuals);
        }
        double r = 0.0;
        for (std::size_t k = 0; k < Y.size(); ++k)
            for (int d = 0; d < 3; ++d) {
                const double g = s.X[k][d] + 0.5 * dt * (f0[k][d] + fy[k][d]);
                const double next = (1.0 - th) * Y[k][d] + th * g;
                r = std::max(r, std::abs(next - Y[k][d]));
                Y[k][d] = next;
            }
        res.residuals.push_back(r);
        res.iterations = it;
        if (!std::isfinite(r) || (it >= 3 && r > 1e3 * std::max(res.residuals.front(), 1e-300)))
            throw PicardRejection("Picard iteration is not contracting; reduce dt", res.residuals);
        if (r <= cfg.picard_tol) {
            res.state.X = std::move(Y);
            res.state.t = s.t + dt;
            refresh_monitors(res.state, lat, cfg);
            return res;
        }
    }
    throw PicardRejection("Picard iteration did not converge within picard_max_iter", res.residuals);
}

// ---------------------------------------------------------------------------
// Driver

TrajectoryRecord simulate(const MarkerLattice& lat, const KernelSpec& kernel, const SolverConfig& cfg) {
    if (kernel.dim() != lat.dim()) throw DomainError("kernel and marker lattice dimensions differ");
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw DomainError("dt and T must be positive");
    const long steps = std::lround(cfg.T / cfg.dt);
    if (steps < 1) throw DomainError("T / dt must round to at least one step");

    // Requested checkpoint -> nearest step.
    std::vector<std::pair<long, double>> checkpoints{{0, 0.0}};
    for (double tc : cfg.checkpoint_times) {
        if (tc < 0.0) throw DomainError("checkpoint times must be nonnegative");
        const long k = std::min(steps, std::lround(tc / cfg.dt));
        if (k > 0) checkpoints.emplace_back(k, tc);
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end(),
                                  [](const auto& a, const auto& b) { return a.first == b.first; }),
                      checkpoints.end());

    TrajectoryRecord rec;
    rec.dt = cfg.dt;
    FlowState s = initial_state(lat, cfg.delta);
    refresh_monitors(s, lat, cfg);
    std::size_t next_cp = 0;
    auto snapshot = [&](long step) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp].first == step) {
            rec.snapshots.push_back({static_cast<int>(step), checkpoints[next_cp].second, s});
            ++next_cp;
        }
    };
    snapshot(0);

    std::vector<Point> v;
    int picard_its = 0;
    for (long step = 0; step < steps; ++step) {
        FlowState next;
        const double t_next = static_cast<double>(step + 1) * cfg.dt;
        if (cfg.integrator == Integrator::rk4) {
            next = step_rk4(s, lat, kernel, cfg.dt, cfg, &v);
        } else {
            PicardStep ps = step_picard(s, lat, kernel, cfg.dt, cfg);
            picard_its = ps.iterations;
            next = std::move(ps.state);
            v = velocity_at(s.X, s.detDX, &s.DX, lat, kernel, s.X, true, cfg.singular_cell_rule, cfg.workers);
        }
        next.t = t_next;  // no accumulated drift in t
        rec.monitors.push_back({static_cast<int>(step), s.t, s.min_detDX, s.phi_norm, max_speed(v, lat.dim()),
                                picard_its});
        if (cfg.store_replay) rec.replay_velocity.push_back(v);
        s = std::move(next);
        if (!s.admissible) {
            rec.halt_reason = "left U_delta";
            rec.completed = false;
            snapshot(step + 1);
            break;
        }
        snapshot(step + 1);
    }
    if (rec.completed) {
        const auto vf = velocity_at(s.X, s.detDX, &s.DX, lat, kernel, s.X, true, cfg.singular_cell_rule, cfg.workers);
        rec.monitors.push_back({static_cast<int>(steps), s.t, s.min_detDX, s.phi_norm, max_speed(vf, lat.dim()), 0});
        if (cfg.store_replay) rec.replay_velocity.push_back(vf);
    } else {
        rec.monitors.push_back({static_cast<int>(rec.monitors.size()), s.t, s.min_detDX, s.phi_norm, 0.0, 0});
    }
    rec.final_state = std::move(s);
    return rec;
}

// ---------------------------------------------------------------------------
// Density reconstruction

namespace {

struct Multilinear {
    const LatticeGeometry& g;

    // Cell origin and fractional coordinates of continuous label coordinate u.
    void locate(const Point& u, std::array<long, 3>& c, Point& s) const {
        c = {0, 0, 0};
        s = {0, 0, 0};
        for (int d = 0; d < g.dim; ++d) {
            const long hi = std::max<long>(0, g.count[d] - 2);
            c[d] = std::clamp(static_cast<long>(std::floor(u[d])), 0L, hi);
            s[d] = u[d] - static_cast<double>(c[d]);
        }
    }

    template <class Fn>
    void corners(const std::array<long, 3>& c, const Point& s, Fn&& fn) const {
        const int ncorner = 1 << g.dim;
        for (int mask = 0; mask < ncorner; ++mask) {
            std::array<long, 3> q = c;
            double w = 1.0;
            Point dw{0, 0, 0};
            for (int d = 0; d < g.dim; ++d) {
                const bool up = (mask >> d) & 1;
                q[d] += up ? 1 : 0;
                w *= up ? s[d] : 1.0 - s[d];
            }
            for (int d = 0; d < g.dim; ++d) {
                double p = 1.0;
                for (int e = 0; e < g.dim; ++e) {
                    const bool up = (mask >> e) & 1;
                    if (e == d) p *= up ? 1.0 : -1.0;
                    else p *= up ? s[e] : 1.0 - s[e];
                }
                dw[d] = p;
            }
            fn(g.flat_index(q), w, dw);
        }
    }
};

double inverse_map_value(const FlowState& st, const MarkerLattice& lat, const Point& p, std::size_t seed) {
    const auto& g = lat.geom;
    const int dim = g.dim;
    const Multilinear ml{g};
    const auto m0 = g.multi_index(seed);
    Point u{static_cast<double>(m0[0]), static_cast<double>(m0[1]), static_cast<double>(m0[2])};
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
        std::array<long, 3> c;
        Point s;
        ml.locate(u, c, s);
        Point x{0, 0, 0};
        Mat3 J{};
        ml.corners(c, s, [&](std::size_t k, double w, const Point& dw) {
            for (int r = 0; r < dim; ++r) {
                x[r] += w * st.X[k][r];
                for (int d = 0; d < dim; ++d) at(J, r, d) += dw[d] * st.X[k][r];
            }
        });
        const Point res = sub(x, p);
        if (std::abs(det(J, dim)) == 0.0) break;
        const Point du = apply(inverse(J, dim), res, dim);
        for (int d = 0; d < dim; ++d) u[d] -= du[d];
        if (norm(du, dim) < 1e-13) {
            converged = true;
            break;
        }
    }
    if (!converged) return std::numeric_limits<double>::quiet_NaN();
    for (int d = 0; d < dim; ++d)
        if (u[d] < -1e-9 || u[d] > static_cast<double>(g.count[d] - 1) + 1e-9) return 0.0;
    std::array<long, 3> c;
    Point s;
    ml.locate(u, c, s);
    double v = 0.0;
    ml.corners(c, s, [&](std::size_t k, double w, const Point&) { v += w * lat.rho0[k]; });
    return v;
}

}  // namespace

SampledField reconstruct_density(const FlowState& st, const MarkerLattice& lat, const std::vector<Point>& eval_points,
                                 Interpolation method, const std::optional<LatticeGeometry>& eval_lattice) {
    const int dim = lat.dim();
    require_finite(st.X);
    if (!st.admissible) throw NumericalError("density requested for a state outside U_delta");
    const detail::PointIndex index(dim, st.X);
    const unsigned k_nn = 1u << dim;
    const double far = 2.0 * lat.geom.h;
    std::vector<double> vals(eval_points.size(), 0.0);
    for (std::size_t e = 0; e < eval_points.size(); ++e) {
        const Point& p = eval_points[e];
        const auto nn = index.knn(p, k_nn);
        if (nn.empty() || nn[0].first > far) continue;  // outside the cloud: density is compactly supported
        if (nn[0].first == 0.0) {
            vals[e] = lat.rho0[nn[0].second];
            continue;
        }
        if (method == Interpolation::inverse_map) {
            const double v = inverse_map_value(st, lat, p, nn[0].second);
            if (std::isfinite(v)) {
                vals[e] = v;
                continue;
            }
        }
        double num = 0.0, den = 0.0;
        for (const auto& [d, k] : nn) {
            const double w = 1.0 / (d * d);
            num += w * lat.rho0[k];
            den += w;
        }
        vals[e] = num / den;
    }
    if (eval_lattice) {
        if (eval_lattice->size() != eval_points.size())
            throw DomainError("reconstruct_density: eval lattice does not match the eval points");
        return SampledField::on_lattice(*eval_lattice, std::move(vals));
    }
    return SampledField::scattered(dim, eval_points, std::move(vals));
}

// ---------------------------------------------------------------------------
// Round trip

RoundTripReport invert_flow_check(const TrajectoryRecord& rec, const MarkerLattice& lat, ReplayInterpolation interp) {
    const auto& u = rec.replay_velocity;
    if (rec.snapshots.empty() || u.size() < 2)
        throw DomainError("invert_flow_check: record lacks snapshots or stored velocities (enable store_replay)");
    const std::size_t nsteps = u.size() - 1;
    const double dt = rec.dt;
    const std::size_t n = lat.size();

    // u(alpha, t) at t = (j + frac) dt by Lagrange interpolation over stored samples.
    auto sample = [&](double tj, std::vector<Point>& out) {
        out.assign(n, Point{0, 0, 0});
        const double pos = tj / dt;
        long j = static_cast<long>(std::floor(pos));
        j = std::clamp<long>(j, 0, static_cast<long>(nsteps) - 1);
        const double f = pos - static_cast<double>(j);
        if (interp == ReplayInterpolation::linear || nsteps < 3) {
            for (std::size_t k = 0; k < n; ++k)
                for (int d = 0; d < 3; ++d) out[k][d] = (1 - f) * u[j][k][d] + f * u[j + 1][k][d];
            return;
        }
        long b = std::clamp<long>(j - 1, 0, static_cast<long>(nsteps) - 3);
        double w[4];
        for (int a = 0; a < 4; ++a) {
            const double xa = static_cast<double>(b + a);
            double l = 1.0;
            for (int c = 0; c < 4; ++c)
                if (c != a) l *= (pos - static_cast<double>(b + c)) / (xa - static_cast<double>(b + c));
            w[a] = l;
        }
        for (int a = 0; a < 4; ++a) {
            const auto& ua = u[static_cast<std::size_t>(b + a)];
            for (std::size_t k = 0; k < n; ++k)
                for (int d = 0; d < 3; ++d) out[k][d] += w[a] * ua[k][d];
        }
    };

    std::vector<Point> Y = rec.final_state.X;
    std::vector<Point> k1, k2, k4;
    const double T = static_cast<double>(nsteps) * dt;
    for (std::size_t s = 0; s < nsteps; ++s) {
        const double t0 = T - static_cast<double>(s) * dt;
        sample(t0, k1);
        sample(t0 - 0.5 * dt, k2);
        sample(t0 - dt, k4);
        // The replayed field does not depend on Y, so k2 == k3.
        for (std::size_t k = 0; k < n; ++k)
            for (int d = 0; d < 3; ++d) Y[k][d] -= dt / 6.0 * (k1[k][d] + 4.0 * k2[k][d] + k4[k][d]);
    }
    RoundTripReport rep;
    rep.steps = static_cast<int>(nsteps);
    const auto labels = lat.labels();
    for (std::size_t k = 0; k < n; ++k)
        for (int d = 0; d < lat.dim(); ++d) rep.max_error = std::max(rep.max_error, std::abs(Y[k][d] - labels[k][d]));
    return rep;
}

}  // namespace nlt
