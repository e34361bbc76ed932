#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "nlt/io.hpp"

namespace {

struct Flag {
    const char* option;
    const char* key;
    const char* help;
};

// Shortcut flags; each one becomes a `key=value` override.
const Flag kFlags[] = {
    {"--kernel", "model.kernel", "kernel name"},
    {"--kernel-sign", "model.kernel_sign", "+1 or -1"},
    {"--n", "model.n", "dimension"},
    {"--gamma", "model.gamma", "Holder exponent in (0, 1)"},
    {"--lattice-h", "lattice.h", "marker lattice spacing"},
    {"--preset", "density.preset", "rho0 preset"},
    {"--dt", "solver.dt", "time step"},
    {"--T", "solver.T", "final time"},
    {"--integrator", "solver.integrator", "rk4 or picard"},
    {"--interpolation", "solver.interpolation", "idw or inverse-map"},
    {"--replay", "solver.replay", "cubic or linear"},
    {"--norm-kind", "sweep.norm_kind", "holder or zygmund"},
    {"--epsilons", "sweep.epsilons", "comma separated"},
    {"--case", "convergence.case", "convergence case"},
    {"--input", "norms.input", "samples CSV"},
    {"--lattice-spacing", "norms.lattice_spacing", "spacing of lattice samples"},
    {"--i", "sio.i", "1-based derivative index"},
    {"--j", "sio.j", "1-based component index"},
    {"--trials", "lemmas.trials", "random trials"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrangian particle simulator and verification harness for the nonlocal transport equation"};
    app.set_version_flag("--version", std::string(nlt::kVersion));
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> sets;
    std::string output_dir;
    std::string seed;
    std::string workers;
    std::map<std::string, std::string> flag_values;

    const std::map<std::string, std::string> about = {
        {"simulate", "advance one marker lattice and write trajectories, monitors and density"},
        {"continuity", "perturbation sweep of the solution map with a log-log fit"},
        {"convergence", "refinement study for one analytic case"},
        {"norms", "Holder and Zygmund norms of sampled data"},
        {"validate-kernels", "homogeneity, gradients, spherical means and Dirac coefficients"},
        {"validate-sio", "singular integral constants on bump families"},
        {"lemmas", "randomized checks of the product and composition inequalities"},
    };
    for (const auto& name : nlt::command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("-c,--config", config_file, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", sets, "override: section.key=value (repeatable)");
        sub->add_option("-o,--output-dir", output_dir, "output directory");
        sub->add_option("--seed", seed, "seed (default 0)");
        sub->add_option("-w,--workers", workers, "worker threads (default: NLT_WORKERS or 1)");
        for (const auto& f : kFlags) sub->add_option(f.option, flag_values[f.key], f.help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<std::string> overrides;
    if (const char* env = std::getenv("NLT_WORKERS"); env && *env) overrides.push_back(std::string("run.workers=") + env);
    for (const auto& [key, value] : flag_values)
        if (!value.empty()) overrides.push_back(key + "=" + value);
    if (!output_dir.empty()) overrides.push_back("run.output_dir=" + output_dir);
    if (!seed.empty()) overrides.push_back("run.seed=" + seed);
    if (!workers.empty()) overrides.push_back("run.workers=" + workers);
    for (const auto& s : sets) overrides.push_back(s);

    try {
        std::optional<std::filesystem::path> file;
        if (!config_file.empty()) file = config_file;
        const auto cfg = nlt::parse_config(nlt::parse_command(command), file, overrides);
        const auto res = nlt::run_command(cfg);
        std::cout << command << ": " << res.manifest.halt_reason << "\n";
        for (const auto& f : res.manifest.files) std::cout << "  " << (cfg.output_dir / f.name).string() << "\n";
        std::cout << "  " << (cfg.output_dir / "manifest.json").string() << "\n";
        return res.exit_code;
    } catch (const nlt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
