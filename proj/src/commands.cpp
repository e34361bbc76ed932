#include <cmath>
#include <json.hpp>

#include "nlt/io.hpp"

namespace nlt {

using json = nlohmann::ordered_json;

namespace {

RunManifest start_manifest(const RunConfig& cfg) {
    RunManifest m;
    m.command = to_string(cfg.command);
    m.config = cfg.explicit_values;
    m.seed = cfg.seed;
    m.workers = cfg.workers;
    m.started = utc_timestamp();
    return m;
}

LatticeGeometry eval_lattice(int dim, double spacing, double half_extent) {
    return LatticeGeometry::centered(dim, spacing, std::lround(half_extent / spacing));
}

RunResult run_simulate(const RunConfig& cfg) {
    const auto& s = cfg.simulate;
    const auto kernel = KernelSpec::builtin(s.kernel, s.kernel_sign);
    const auto lat = MarkerLattice::from_profile(s.density.build(s.dim), s.h, s.gamma);
    const TrajectoryRecord rec = simulate(lat, kernel, s.solver);
    std::optional<RoundTripReport> trip;
    if (s.round_trip && rec.completed) trip = invert_flow_check(rec, lat, s.replay);
    const auto eval = eval_lattice(s.dim, s.eval_spacing, s.eval_half_extent);

    json meta;
    meta["schema"] = "nlt-simulate/" + std::to_string(kSchemaVersion);
    meta["kernel"] = s.kernel;
    meta["kernel_sign"] = s.kernel_sign;
    meta["n"] = s.dim;
    meta["gamma"] = s.gamma;
    meta["h"] = s.h;
    meta["markers"] = lat.size();
    meta["lattice_lo"] = {lat.geom.lo[0], lat.geom.lo[1], lat.geom.lo[2]};
    meta["lattice_count"] = {lat.geom.count[0], lat.geom.count[1], lat.geom.count[2]};
    meta["density_preset"] = s.density.preset;
    meta["integrator"] = to_string(s.solver.integrator);
    meta["dt"] = s.solver.dt;
    meta["T"] = s.solver.T;
    meta["delta"] = s.solver.delta;
    meta["singular_cell_rule"] = to_string(s.solver.singular_cell_rule);
    meta["interpolation"] = to_string(s.interpolation);
    meta["t_final"] = rec.final_state.t;
    meta["completed"] = rec.completed;
    meta["halt_reason"] = rec.halt_reason;
    meta["min_det_dx"] = rec.final_state.min_detDX;
    meta["phi_norm"] = rec.final_state.phi_norm;
    json snaps = json::array();
    for (const auto& sn : rec.snapshots)
        snaps.push_back({{"step", sn.step}, {"requested_t", sn.requested_t}, {"t", sn.state.t}});
    meta["checkpoints"] = snaps;
    if (trip) meta["round_trip_error"] = trip->max_error;
    else meta["round_trip_error"] = nullptr;

    OutputWriter out(cfg.output_dir);
    out.write_csv("markers.csv", markers_table(rec, lat));
    out.write_csv("monitors.csv", monitors_table(rec));
    out.write_csv("density.csv", density_table(rec, lat, eval, s.interpolation));
    out.write_json("metadata.json", "nlt-simulate/" + std::to_string(kSchemaVersion), meta.dump(2) + "\n");
    RunManifest m = start_manifest(cfg);
    m.halt_reason = rec.halt_reason;
    m.exit_code = rec.completed ? 0 : 3;
    return {out.finish(m), m.exit_code};
}

RunResult run_continuity(const RunConfig& cfg) {
    const SweepReport rep = continuity_sweep(cfg.sweep);
    OutputWriter out(cfg.output_dir);
    out.write_csv("sweep.csv", sweep_table(rep));
    out.write_json("fit.json", "nlt-sweep-fit/" + std::to_string(kSchemaVersion), sweep_fit_json(rep));
    RunManifest m = start_manifest(cfg);
    if (!rep.base_admissible) {
        m.halt_reason = "base run left U_delta";
        m.exit_code = 3;
    }
    return {out.finish(m), m.exit_code};
}

RunResult run_convergence(const RunConfig& cfg) {
    const ConvergenceReport rep = convergence_study(cfg.convergence);
    OutputWriter out(cfg.output_dir);
    out.write_csv("convergence.csv", convergence_table(rep));
    out.write_csv("orders.csv", orders_table(rep));
    RunManifest m = start_manifest(cfg);
    if (!rep.passed) {
        m.halt_reason = "convergence check failed";
        m.exit_code = 3;
    }
    return {out.finish(m), m.exit_code};
}

RunResult run_norms(const RunConfig& cfg) {
    const auto& n = cfg.norms;
    const SampledField f = read_sampled_field(n.input, n.dim, n.lattice_spacing);
    std::vector<double> levels = n.h_levels;
    if (levels.empty()) levels = dyadic_levels(8.0 * typical_spacing(f), 4);
    PairOptions pairs;
    pairs.seed = cfg.seed;
    pairs.workers = cfg.workers;
    const NormReport rep = norm_report(f, n.gamma, levels, pairs);
    OutputWriter out(cfg.output_dir);
    out.write_json("norms.json", "nlt-norms/" + std::to_string(kSchemaVersion), norms_json(rep));
    out.write_csv("modulus.csv", modulus_table(rep));
    RunManifest m = start_manifest(cfg);
    return {out.finish(m), 0};
}

RunResult run_validate_kernels(const RunConfig& cfg) {
    const auto& k = cfg.kernels;
    const auto names = k.kernels.empty() ? KernelSpec::builtin_names() : k.kernels;
    std::vector<KernelValidation> v;
    bool ok = true;
    for (const auto& name : names) {
        v.push_back(validate_kernel(KernelSpec::builtin(name, k.kernel_sign), k.quadrature_order, cfg.seed, k.samples));
        ok = ok && v.back().passed;
    }
    OutputWriter out(cfg.output_dir);
    out.write_csv("kernels.csv", kernels_table(v));
    out.write_csv("dirac.csv", dirac_table(v));
    RunManifest m = start_manifest(cfg);
    if (!ok) {
        m.halt_reason = "kernel validation failed";
        m.exit_code = 3;
    }
    return {out.finish(m), m.exit_code};
}

RunResult run_validate_sio(const RunConfig& cfg) {
    const auto& s = cfg.sio;
    const auto kernel = KernelSpec::builtin(s.kernel, s.kernel_sign);
    PairOptions pairs;
    pairs.seed = cfg.seed;
    std::vector<SIOReport> reports;
    for (double h : s.h_list) {
        std::vector<NamedField> fam;
        for (double w : s.widths) fam.push_back({"bump-w" + format_real(w), gaussian_bump_field(kernel.dim(), w, h)});
        PVConfig pv = PVConfig::for_spacing(h);
        pv.epsilon = s.epsilon_factor * h;
        reports.push_back(estimate_sio_constants(kernel, s.i, s.j, fam, s.gamma, pv, cfg.workers, pairs));
    }
    OutputWriter out(cfg.output_dir);
    out.write_csv("sio.csv", sio_table(reports));
    RunManifest m = start_manifest(cfg);
    return {out.finish(m), 0};
}

RunResult run_lemmas(const RunConfig& cfg) {
    const LemmaSuiteReport rep = lemma_suite(cfg.lemmas);
    OutputWriter out(cfg.output_dir);
    out.write_json("lemmas.json", "nlt-lemmas/" + std::to_string(kSchemaVersion), lemmas_json(rep));
    out.write_csv("inequalities.csv", inequalities_table(rep));
    RunManifest m = start_manifest(cfg);
    if (!rep.passed) {
        m.halt_reason = "lemma suite failed";
        m.exit_code = 3;
    }
    return {out.finish(m), m.exit_code};
}

}  // namespace

RunResult run_command(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::simulate: return run_simulate(cfg);
        case Command::continuity: return run_continuity(cfg);
        case Command::convergence: return run_convergence(cfg);
        case Command::norms: return run_norms(cfg);
        case Command::validate_kernels: return run_validate_kernels(cfg);
        case Command::validate_sio: return run_validate_sio(cfg);
        case Command::lemmas: return run_lemmas(cfg);
    }
    throw ConfigError("unknown command");
}

}  // namespace nlt
