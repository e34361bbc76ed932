#include "nlt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nlt/parallel.hpp"

namespace nlt {

NormKind parse_norm_kind(const std::string& s) {
    if (s == "holder") return NormKind::holder;
    if (s == "zygmund") return NormKind::zygmund;
    throw ConfigError("norm_kind must be holder or zygmund, got '" + s + "'");
}

std::string to_string(NormKind k) { return k == NormKind::holder ? "holder" : "zygmund"; }

// ---------------------------------------------------------------------------
// Sweep configuration

ContinuitySweepConfig ContinuitySweepConfig::holder_default() {
    ContinuitySweepConfig c;
    c.base.preset = "gaussian";
    c.base.params.sigma = 0.2;
    c.perturbation.preset = "gaussian";
    c.perturbation.params.sigma = 0.08;
    c.perturbation.params.center = {0.25, 0.1, 0.0};
    c.solver.dt = 0.01;
    c.solver.T = 0.5;
    c.solver.delta = 1e9;
    c.solver.checkpoint_times = {0.25, 0.5};
    return c;
}

ContinuitySweepConfig ContinuitySweepConfig::zygmund_default() {
    ContinuitySweepConfig c = holder_default();
    c.base.preset = "cusp";
    c.base.params.radius = 0.5;
    c.base.params.mollification = 0.05;
    c.norm_kind = NormKind::zygmund;
    return c;
}

void ContinuitySweepConfig::validate() const {
    std::vector<std::string> problems;
    if (dim != 2 && dim != 3) problems.push_back("n must be 2 or 3");
    if (!(gamma > 0.0 && gamma < 1.0)) problems.push_back("gamma must lie in the open interval (0, 1)");
    if (!(h > 0.0)) problems.push_back("h must be positive");
    if (!(solver.dt > 0.0)) problems.push_back("dt must be positive");
    if (!(solver.T > 0.0)) problems.push_back("T must be positive");
    if (!(eval_spacing > 0.0) || !(eval_half_extent > 0.0))
        problems.push_back("eval_spacing and eval_half_extent must be positive");
    if (epsilons.empty()) problems.push_back("epsilons must not be empty");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] >= 0.0) || (epsilons[k] == 0.0 && k + 1 != epsilons.size()))
            problems.push_back("epsilons must be positive (0 only as the last entry)");
        if (k > 0 && !(epsilons[k] < epsilons[k - 1])) problems.push_back("epsilons must be strictly decreasing");
    }
    if (kernel_sign != 1.0 && kernel_sign != -1.0) problems.push_back("kernel_sign must be +1 or -1");
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid sweep configuration:";
        for (const auto& p : problems) os << "\n  - " << p;
        throw ConfigError(os.str());
    }
}

// ---------------------------------------------------------------------------
// Distances and fits

double field_norm(const SampledField& f, NormKind kind, double gamma, const PairOptions& pairs) {
    const double sup = sup_norm(f);
    if (kind == NormKind::holder) return sup + holder_seminorm(f, gamma, pairs);
    return sup + zygmund_seminorm(f);
}

double flow_distance(const FlowState& a, const FlowState& b, const MarkerLattice& lat, const PairOptions& pairs) {
    const int dim = lat.dim();
    const std::size_t n = lat.size();
    double sup_x = 0.0, sup_d = 0.0;
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(dim * dim), std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (int d = 0; d < dim; ++d) sup_x = std::max(sup_x, std::abs(a.X[k][d] - b.X[k][d]));
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                const double v = at(a.DX[k], r, c) - at(b.DX[k], r, c);
                comps[static_cast<std::size_t>(r * dim + c)][k] = v;
                sup_d = std::max(sup_d, std::abs(v));
            }
    }
    const auto labels = lat.labels();
    return sup_x + sup_d + holder_seminorm_multi(dim, labels, lat.geom, comps, lat.gamma, pairs);
}

LogFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LogFit fit;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return fit;
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) return 0.0;
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        sab += (ra[k] - ma) * (rb[k] - mb);
        saa += (ra[k] - ma) * (ra[k] - ma);
        sbb += (rb[k] - mb) * (rb[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Sweeps

SweepReport continuity_sweep(const ContinuitySweepConfig& cfg) {
    cfg.validate();
    const auto kernel = KernelSpec::builtin(cfg.kernel, cfg.kernel_sign);
    if (kernel.dim() != cfg.dim) throw ConfigError("kernel " + cfg.kernel + " does not match n");
    const DensityProfile base = cfg.base.build(cfg.dim);
    const DensityProfile phi = cfg.perturbation.build(cfg.dim);

    // One marker lattice for every run: it covers base and perturbation supports.
    const double eps_max = cfg.epsilons.front() > 0.0 ? cfg.epsilons.front() : 1.0;
    const DensityProfile widest = perturbed(base, phi, eps_max);
    const MarkerLattice base_lat = MarkerLattice::from_profile(widest, cfg.h, cfg.gamma);
    const auto labels = base_lat.labels();
    auto lattice_for = [&](double eps) {
        std::vector<double> rho(labels.size());
        const DensityProfile p = perturbed(base, phi, eps);
        for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = p(labels[k]);
        return MarkerLattice::from_values(base_lat.geom, std::move(rho), cfg.gamma);
    };

    const long half = std::lround(cfg.eval_half_extent / cfg.eval_spacing);
    const LatticeGeometry eval_geom = LatticeGeometry::centered(cfg.dim, cfg.eval_spacing, half);
    const auto eval_pts = eval_geom.nodes();

    // Run 0 is the base problem, run k the k-th epsilon.
    const std::size_t runs = cfg.epsilons.size() + 1;
    std::vector<MarkerLattice> lats;
    lats.push_back(lattice_for(0.0));
    for (double e : cfg.epsilons) lats.push_back(lattice_for(e));
    std::vector<TrajectoryRecord> recs(runs);
    SolverConfig solver = cfg.solver;
    solver.phi_pairs.seed = cfg.seed;
    const int outer = std::max(1, cfg.workers);
    solver.workers = 1;
    parallel_for(runs, outer, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) recs[r] = simulate(lats[r], kernel, solver);
    });
    if (outer == 1) {
        // nothing else to do: simulate ran sequentially
    }

    PairOptions pairs;
    pairs.seed = cfg.seed;
    SweepReport rep;
    rep.norm_kind = cfg.norm_kind;
    rep.base_admissible = recs[0].completed;

    // Reconstructed base densities at the checkpoint snapshots (t > 0).
    auto checkpoint_states = [&](const TrajectoryRecord& rec) {
        std::vector<const FlowState*> out;
        for (const auto& s : rec.snapshots)
            if (s.step > 0) out.push_back(&s.state);
        if (out.empty() && rec.completed) out.push_back(&rec.final_state);
        return out;
    };
    const auto base_states = checkpoint_states(recs[0]);
    std::vector<SampledField> base_rho;
    for (const auto* s : base_states)
        base_rho.push_back(reconstruct_density(*s, lats[0], eval_pts, cfg.interpolation, eval_geom));

    for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) {
        const double eps = cfg.epsilons[k];
        SweepRow row;
        row.epsilon = eps;
        row.admissible_to_T = recs[k + 1].completed;
        const DensityProfile p = perturbed(base, phi, eps);
        std::vector<double> diff(eval_pts.size());
        for (std::size_t q = 0; q < eval_pts.size(); ++q) diff[q] = p(eval_pts[q]) - base(eval_pts[q]);
        row.input_distance = field_norm(SampledField::on_lattice(eval_geom, std::move(diff)), cfg.norm_kind, cfg.gamma, pairs);

        const auto states = checkpoint_states(recs[k + 1]);
        const std::size_t common = std::min(states.size(), base_states.size());
        for (std::size_t c = 0; c < common; ++c) {
            const auto rho = reconstruct_density(*states[c], lats[k + 1], eval_pts, cfg.interpolation, eval_geom);
            std::vector<double> d(eval_pts.size());
            for (std::size_t q = 0; q < d.size(); ++q) d[q] = rho.values[q] - base_rho[c].values[q];
            row.output_distance = std::max(
                row.output_distance, field_norm(SampledField::on_lattice(eval_geom, std::move(d)), cfg.norm_kind, cfg.gamma, pairs));
            row.flow_distance = std::max(row.flow_distance, flow_distance(*states[c], *base_states[c], base_lat, pairs));
        }
        rep.rows.push_back(row);
    }

    std::vector<double> in, out, fl;
    for (const auto& r : rep.rows) {
        if (!r.admissible_to_T || r.epsilon == 0.0 || !(r.input_distance > 0.0) || !(r.output_distance > 0.0)) continue;
        in.push_back(r.input_distance);
        out.push_back(r.output_distance);
        fl.push_back(r.flow_distance);
    }
    const LogFit f = log_log_fit(in, out);
    rep.fit.beta = f.slope;
    rep.fit.r_squared = f.r_squared;
    rep.fit.spearman = spearman(fl, out);
    rep.fit.points = static_cast<int>(in.size());
    rep.strictly_decreasing = out.size() >= 2;
    for (std::size_t k = 1; k < out.size(); ++k)
        if (!(out[k] < out[k - 1])) rep.strictly_decreasing = false;
    return rep;
}

SweepReport zygmund_sweep(ContinuitySweepConfig cfg) {
    cfg.norm_kind = NormKind::zygmund;
    return continuity_sweep(cfg);
}

// ---------------------------------------------------------------------------
// Convergence

std::vector<std::string> convergence_case_names() {
    return {"radial-euler-stationary", "gradn-patch-exponential", "qg-radial-stationary", "rk4-temporal"};
}

ConvergenceConfig ConvergenceConfig::resolved() const {
    ConvergenceConfig c = *this;
    const auto names = convergence_case_names();
    if (std::find(names.begin(), names.end(), case_name) == names.end())
        throw ConfigError("unknown convergence case '" + case_name + "'");
    if (c.h_list.empty()) {
        if (case_name == "qg-radial-stationary") c.h_list = {1.0 / 8, 1.0 / 12, 1.0 / 16};
        else if (case_name == "rk4-temporal") c.h_list = {1.0 / 32};
        else c.h_list = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    }
    if (c.dt_list.empty()) {
        if (case_name == "rk4-temporal") c.dt_list = {0.2, 0.1, 0.05, 0.025};
        else if (case_name == "qg-radial-stationary") c.dt_list = {0.05};
        else c.dt_list = {0.01};
    }
    if (!(c.T > 0.0)) throw ConfigError("T must be positive");
    for (double h : c.h_list)
        if (!(h > 0.0)) throw ConfigError("h values must be positive");
    for (double dt : c.dt_list)
        if (!(dt > 0.0)) throw ConfigError("dt values must be positive");
    return c;
}

double plateau_mean_radius(const FlowState& s, const MarkerLattice& lat) {
    const double top = *std::max_element(lat.rho0.begin(), lat.rho0.end());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < lat.size(); ++k)
        if (lat.rho0[k] == top) {
            sum += norm(s.X[k], lat.dim());
            ++count;
        }
    return count ? sum / static_cast<double>(count) : 0.0;
}

namespace {

double max_abs_diff(const std::vector<Point>& a, const std::vector<Point>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (int d = 0; d < 3; ++d) m = std::max(m, std::abs(a[k][d] - b[k][d]));
    return m;
}

SolverConfig quiet_solver(double dt, double T, int workers) {
    SolverConfig s;
    s.dt = dt;
    s.T = T;
    s.delta = 1e9;
    s.workers = workers;
    return s;
}

double stationary_drift(const char* kernel, int dim, double h, double dt, double T, Interpolation interp,
                        int workers) {
    PresetParams p;
    const auto lat = MarkerLattice::from_profile(make_density("gaussian", dim, p), h, 0.5);
    const auto rec = simulate(lat, KernelSpec::builtin(kernel), quiet_solver(dt, T, workers));
    if (!rec.completed) throw NumericalError("convergence run left U_delta");
    const auto labels = lat.labels();
    const auto rho = reconstruct_density(rec.final_state, lat, labels, interp);
    double drift = 0.0, top = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        drift = std::max(drift, std::abs(rho.values[k] - lat.rho0[k]));
        top = std::max(top, std::abs(lat.rho0[k]));
    }
    return drift / top;
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceConfig& in) {
    const ConvergenceConfig cfg = in.resolved();
    ConvergenceReport rep;
    rep.case_name = cfg.case_name;
    std::vector<double> axis, err;

    if (cfg.case_name == "radial-euler-stationary" || cfg.case_name == "qg-radial-stationary") {
        const bool qg = cfg.case_name == "qg-radial-stationary";
        rep.axis = "h";
        rep.required_order = 0.9;
        for (double h : cfg.h_list) {
            const double e = stationary_drift(qg ? "qg-3d" : "biot-savart-2d", qg ? 3 : 2, h, cfg.dt_list.front(),
                                              cfg.T, cfg.interpolation, cfg.workers);
            rep.rows.push_back({cfg.case_name, "relative_density_drift", h, cfg.dt_list.front(), e});
        }
    } else if (cfg.case_name == "gradn-patch-exponential") {
        rep.axis = "h";
        for (double h : cfg.h_list) {
            PresetParams p;
            const auto lat = MarkerLattice::from_profile(make_density("mollified-disk", 2, p), h, 0.5);
            SolverConfig s = quiet_solver(cfg.dt_list.front(), cfg.T, cfg.workers);
            for (int q = 1; q <= 4; ++q) s.checkpoint_times.push_back(cfg.T * q / 4.0);
            const auto rec = simulate(lat, KernelSpec::builtin("grad-newtonian-2d"), s);
            if (!rec.completed) throw NumericalError("convergence run left U_delta");
            std::vector<double> ts, lr;
            for (const auto& snap : rec.snapshots) {
                ts.push_back(snap.state.t);
                lr.push_back(std::log(plateau_mean_radius(snap.state, lat)));
            }
            // slope of log r against t (not log t): fit on (exp t, r) would be circular
            const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
            const double ml = std::accumulate(lr.begin(), lr.end(), 0.0) / static_cast<double>(lr.size());
            double num = 0, den = 0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                num += (ts[k] - mt) * (lr[k] - ml);
                den += (ts[k] - mt) * (ts[k] - mt);
            }
            const double rate = num / den;
            rep.fitted_rates.push_back(rate);
            rep.rows.push_back({cfg.case_name, "radius_rate_relative_error", h, cfg.dt_list.front(),
                                std::abs(rate - 0.5) / 0.5});
        }
    } else {  // rk4-temporal
        rep.axis = "dt";
        rep.required_order = 3.5;
        PresetParams bp, pp;
        pp.sigma = 0.08;
        pp.center = {0.25, 0.1, 0.0};
        pp.amplitude = 0.5;
        const auto prof = perturbed(make_density("gaussian", 2, bp), make_density("gaussian", 2, pp), 1.0);
        const auto lat = MarkerLattice::from_profile(prof, cfg.h_list.front(), 0.5);
        const auto kernel = KernelSpec::builtin("biot-savart-2d");
        std::vector<std::vector<Point>> finals;
        for (double dt : cfg.dt_list) {
            const auto rec = simulate(lat, kernel, quiet_solver(dt, cfg.T, cfg.workers));
            if (!rec.completed) throw NumericalError("convergence run left U_delta");
            finals.push_back(rec.final_state.X);
        }
        for (std::size_t k = 0; k + 1 < finals.size(); ++k)
            rep.rows.push_back({cfg.case_name, "self_convergence_difference", cfg.h_list.front(), cfg.dt_list[k],
                                max_abs_diff(finals[k], finals[k + 1])});
    }

    for (const auto& r : rep.rows) {
        axis.push_back(rep.axis == "h" ? r.h : r.dt);
        err.push_back(r.error);
    }
    rep.monotone = err.size() >= 2;
    for (std::size_t k = 1; k < err.size(); ++k)
        if (!(err[k] < err[k - 1])) rep.monotone = false;
    bool positive = true;
    for (double e : err) positive = positive && e > 0.0;
    rep.observed_order = positive ? log_log_fit(axis, err).slope : 0.0;
    if (cfg.case_name == "gradn-patch-exponential")
        rep.passed = rep.monotone && !err.empty() && err.back() <= 0.01;
    else
        rep.passed = rep.monotone && rep.observed_order >= rep.required_order;
    return rep;
}

// ---------------------------------------------------------------------------
// Lemma suite

LemmaSuiteReport lemma_suite(const LemmaSuiteOptions& opts) {
    LemmaSuiteReport rep;
    rep.trials = opts.trials;
    rep.seed = opts.seed;
    if (opts.trials < 0) throw DomainError("trials must be nonnegative");
    if (opts.trials == 0) return rep;

    HolderSuiteOptions ho;
    ho.trials = opts.trials;
    ho.seed = opts.seed;
    rep.holder = verify_holder_inequalities(ho);
    ZygmundSuiteOptions zo;
    zo.trials = opts.trials;
    zo.seed = opts.seed;
    rep.zygmund = verify_zygmund_inequalities(zo);

    const std::pair<const char*, double> expected[] = {
        {"biot-savart-2d", 0.0}, {"grad-newtonian-2d", 1.0}, {"grad-newtonian-3d", 1.0}, {"qg-3d", 0.0}};
    for (const auto& [name, tr] : expected) {
        const auto k = KernelSpec::builtin(name);
        DiracCheck d;
        d.kernel = name;
        d.c = dirac_correction(k, k.dim() == 2 ? 256 : 64);
        d.expected_trace = tr;
        d.passed = std::abs(d.c.trace() - tr) <= 1e-8;
        rep.dirac.push_back(d);
    }

    const auto bs = KernelSpec::builtin("biot-savart-2d");
    SIOStability st;
    auto family = [](double h) {
        std::vector<NamedField> fam;
        for (const char* id : {"bump-w1", "bump-w1/2", "bump-w1/4"}) {
            const double w = std::string(id) == "bump-w1" ? 1.0 : std::string(id) == "bump-w1/2" ? 0.5 : 0.25;
            fam.push_back({id, gaussian_bump_field(2, w, h)});
        }
        return fam;
    };
    PairOptions pairs;
    pairs.seed = opts.seed;
    st.coarse = estimate_sio_constants(bs, 0, 1, family(1.0 / 16), 0.5, PVConfig::for_spacing(1.0 / 16), opts.workers, pairs);
    st.fine = estimate_sio_constants(bs, 0, 1, family(1.0 / 32), 0.5, PVConfig::for_spacing(1.0 / 32), opts.workers, pairs);
    for (std::size_t k = 0; k < st.coarse.rows.size(); ++k) {
        const auto& a = st.coarse.rows[k];
        const auto& b = st.fine.rows[k];
        for (auto [ca, cb] : {std::pair{a.implied_c_eps, b.implied_c_eps}, std::pair{a.implied_c_sna, b.implied_c_sna}}) {
            st.max_constant = std::max({st.max_constant, ca, cb});
            if (ca > 0.0 && cb > 0.0) st.max_drift = std::max({st.max_drift, ca / cb, cb / ca});
        }
    }
    st.passed = st.max_constant <= 10.0 && st.max_drift <= 2.0;
    rep.sio.push_back(st);

    rep.passed = rep.holder.passed && rep.zygmund.passed;
    for (const auto& d : rep.dirac) rep.passed = rep.passed && d.passed;
    for (const auto& s : rep.sio) rep.passed = rep.passed && s.passed;
    return rep;
}

}  // namespace nlt
