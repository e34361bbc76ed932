#include "nlt/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <climits>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

namespace nlt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

Command parse_command(const std::string& s) {
    if (s == "simulate") return Command::simulate;
    if (s == "continuity") return Command::continuity;
    if (s == "convergence") return Command::convergence;
    if (s == "norms") return Command::norms;
    if (s == "validate-kernels") return Command::validate_kernels;
    if (s == "validate-sio") return Command::validate_sio;
    if (s == "lemmas") return Command::lemmas;
    throw ConfigError("unknown command '" + s + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::continuity: return "continuity";
        case Command::convergence: return "convergence";
        case Command::norms: return "norms";
        case Command::validate_kernels: return "validate-kernels";
        case Command::validate_sio: return "validate-sio";
        case Command::lemmas: return "lemmas";
    }
    return "?";
}

std::vector<std::string> command_names() {
    return {"simulate", "continuity", "convergence", "norms", "validate-kernels", "validate-sio", "lemmas"};
}

// ---------------------------------------------------------------------------
// Config registry

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"run.output_dir", "string", "output directory"},
        {"run.seed", "int", "seed for every sampler (default 0)"},
        {"run.workers", "int", "worker threads (NLT_WORKERS overrides the file)"},
        {"model.kernel", "string", "biot-savart-2d, grad-newtonian-2d, grad-newtonian-3d, qg-3d"},
        {"model.kernel_sign", "real", "+1 or -1"},
        {"model.n", "int", "spatial dimension, must match the kernel"},
        {"model.gamma", "real", "Holder exponent, 0 < gamma < 1"},
        {"lattice.h", "real", "marker lattice spacing"},
        {"density.preset", "string", "gaussian, mollified-disk, ring, cusp, custom"},
        {"density.amplitude", "real", ""},
        {"density.center", "list", "n coordinates"},
        {"density.sigma", "real", "gaussian width"},
        {"density.radius", "real", "disk, ring or cusp radius"},
        {"density.width", "real", "disk edge or ring thickness"},
        {"density.mollification", "real", "cusp rounding"},
        {"density.rho0_csv", "string", "custom samples x_1..x_n,value"},
        {"density.rho0_csv_spacing", "real", "lattice spacing of the custom samples"},
        {"perturbation.preset", "string", "sweep perturbation phi"},
        {"perturbation.amplitude", "real", ""},
        {"perturbation.center", "list", ""},
        {"perturbation.sigma", "real", ""},
        {"perturbation.radius", "real", ""},
        {"perturbation.width", "real", ""},
        {"perturbation.mollification", "real", ""},
        {"solver.integrator", "string", "rk4 or picard"},
        {"solver.dt", "real", ""},
        {"solver.T", "real", "final time"},
        {"solver.delta", "real", "U_delta radius"},
        {"solver.picard_tol", "real", ""},
        {"solver.picard_max_iter", "int", ""},
        {"solver.picard_damping", "real", "0 < damping <= 1"},
        {"solver.singular_cell_rule", "string", "exclude or polar-correct"},
        {"solver.checkpoints", "list", "snapshot times (nearest step)"},
        {"solver.interpolation", "string", "idw or inverse-map"},
        {"solver.round_trip", "bool", "store velocities and report the backward round trip"},
        {"solver.replay", "string", "cubic or linear replay interpolation"},
        {"eval.spacing", "real", "comparison / output lattice spacing"},
        {"eval.half_extent", "real", "comparison lattice covers [-L, L]^n"},
        {"sweep.epsilons", "list", "strictly decreasing, trailing 0 allowed"},
        {"sweep.norm_kind", "string", "holder or zygmund"},
        {"convergence.case", "string", ""},
        {"convergence.h_list", "list", ""},
        {"convergence.dt_list", "list", ""},
        {"norms.input", "string", "CSV x_1..x_n,value"},
        {"norms.lattice_spacing", "real", "> 0 when the samples lie on a lattice"},
        {"norms.h_levels", "list", "modulus levels"},
        {"kernels.names", "list", "kernels to validate (default all)"},
        {"kernels.quadrature_order", "int", ""},
        {"kernels.samples", "int", "random homogeneity samples"},
        {"sio.i", "int", "1-based derivative index"},
        {"sio.j", "int", "1-based component index"},
        {"sio.widths", "list", "bump widths"},
        {"sio.h_list", "list", "lattice spacings"},
        {"sio.epsilon_factor", "real", "excision radius in lattice spacings"},
        {"lemmas.trials", "int", ""},
    };
    return keys;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(s);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    return out;
}

bool known_key(const std::string& k) {
    for (const auto& c : config_keys())
        if (c.name == k) return true;
    return false;
}

/// Canonical section.key for `k`, or an error message.
std::optional<std::string> canonical_key(const std::string& k, std::string& problem) {
    if (k.find('.') != std::string::npos) {
        if (known_key(k)) return k;
        problem = "unknown key '" + k + "'";
        return std::nullopt;
    }
    std::vector<std::string> hits;
    for (const auto& c : config_keys())
        if (c.name.substr(c.name.find('.') + 1) == k) hits.push_back(c.name);
    if (hits.size() == 1) return hits.front();
    if (hits.empty()) problem = "unknown key '" + k + "'";
    else problem = "ambiguous key '" + k + "' (use a section: " + hits[0] + ", " + hits[1] + ")";
    return std::nullopt;
}

class Reader {
public:
    Reader(const std::map<std::string, std::string>& v, std::vector<std::string>& problems)
        : v_(v), problems_(problems) {}

    bool has(const std::string& k) const { return v_.count(k) > 0; }

    void real(const std::string& k, double& out) const {
        if (!has(k)) return;
        try {
            out = parse_real(v_.at(k));
        } catch (const Error&) {
            problems_.push_back(k + ": expected a number, got '" + v_.at(k) + "'");
        }
    }
    void integer(const std::string& k, int& out) const {
        if (!has(k)) return;
        const std::string& s = v_.at(k);
        int x = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size())
            problems_.push_back(k + ": expected an integer, got '" + s + "'");
        else
            out = x;
    }
    void u64(const std::string& k, std::uint64_t& out) const {
        if (!has(k)) return;
        const std::string& s = v_.at(k);
        std::uint64_t x = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size())
            problems_.push_back(k + ": expected a nonnegative integer, got '" + s + "'");
        else
            out = x;
    }
    void string(const std::string& k, std::string& out) const {
        if (has(k)) out = v_.at(k);
    }
    void boolean(const std::string& k, bool& out) const {
        if (!has(k)) return;
        const std::string& s = v_.at(k);
        if (s == "true" || s == "1" || s == "yes" || s == "on") out = true;
        else if (s == "false" || s == "0" || s == "no" || s == "off") out = false;
        else problems_.push_back(k + ": expected true or false, got '" + s + "'");
    }
    void list(const std::string& k, std::vector<double>& out) const {
        if (!has(k)) return;
        std::vector<double> tmp;
        for (const auto& c : split(v_.at(k), ',')) {
            if (c.empty()) continue;
            try {
                tmp.push_back(parse_real(c));
            } catch (const Error&) {
                problems_.push_back(k + ": expected a list of numbers, got '" + v_.at(k) + "'");
                return;
            }
        }
        out = std::move(tmp);
    }
    void point(const std::string& k, Point& out, int dim) const {
        if (!has(k)) return;
        std::vector<double> tmp;
        list(k, tmp);
        if (static_cast<int>(tmp.size()) != dim) {
            problems_.push_back(k + ": expected " + std::to_string(dim) + " coordinates");
            return;
        }
        out = {0, 0, 0};
        for (int d = 0; d < dim; ++d) out[d] = tmp[static_cast<std::size_t>(d)];
    }
    template <class F>
    void parsed(const std::string& k, F&& parse) const {
        if (!has(k)) return;
        try {
            parse(v_.at(k));
        } catch (const Error& e) {
            problems_.push_back(k + ": " + e.what());
        }
    }

private:
    const std::map<std::string, std::string>& v_;
    std::vector<std::string>& problems_;
};

void read_density(const Reader& r, const std::string& sec, DensitySpec& d, int dim) {
    r.string(sec + ".preset", d.preset);
    r.real(sec + ".amplitude", d.params.amplitude);
    r.point(sec + ".center", d.params.center, dim);
    r.real(sec + ".sigma", d.params.sigma);
    r.real(sec + ".radius", d.params.radius);
    r.real(sec + ".width", d.params.width);
    r.real(sec + ".mollification", d.params.mollification);
    if (sec == "density") {
        std::string path;
        r.string("density.rho0_csv", path);
        if (!path.empty()) d.params.csv_path = fs::absolute(path).string();
        r.real("density.rho0_csv_spacing", d.params.csv_spacing);
    }
}

void read_solver(const Reader& r, SolverConfig& s) {
    r.parsed("solver.integrator", [&](const std::string& v) { s.integrator = parse_integrator(v); });
    r.real("solver.dt", s.dt);
    r.real("solver.T", s.T);
    r.real("solver.delta", s.delta);
    r.real("solver.picard_tol", s.picard_tol);
    r.integer("solver.picard_max_iter", s.picard_max_iter);
    r.real("solver.picard_damping", s.picard_damping);
    r.parsed("solver.singular_cell_rule", [&](const std::string& v) { s.singular_cell_rule = parse_cell_rule(v); });
    r.list("solver.checkpoints", s.checkpoint_times);
}

void check_solver(const SolverConfig& s, std::vector<std::string>& p) {
    if (!(s.dt > 0.0)) p.push_back("solver.dt must be positive");
    if (!(s.T > 0.0)) p.push_back("solver.T must be positive");
    if (!(s.delta > 0.0)) p.push_back("solver.delta must be positive");
    if (!(s.picard_tol > 0.0)) p.push_back("solver.picard_tol must be positive");
    if (s.picard_max_iter < 1) p.push_back("solver.picard_max_iter must be at least 1");
    if (!(s.picard_damping > 0.0 && s.picard_damping <= 1.0)) p.push_back("solver.picard_damping must lie in (0, 1]");
    for (double t : s.checkpoint_times)
        if (!(t >= 0.0 && t <= s.T)) p.push_back("solver.checkpoints must lie in [0, T]");
}

void check_gamma(double g, std::vector<std::string>& p) {
    if (!(g > 0.0 && g < 1.0))
        p.push_back("model.gamma must lie in the open interval (0, 1), got " + format_real(g));
}

}  // namespace

double parse_real(const std::string& raw) {
    const std::string s = trim(raw);
    auto one = [&](const std::string& t) {
        double x = 0.0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
            throw ConfigError("not a number: '" + raw + "'");
        return x;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return one(s);
    const double den = one(trim(s.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("zero denominator in '" + raw + "'");
    return one(trim(s.substr(0, slash))) / den;
}

RunConfig parse_config_text(Command command, const std::string& text, const std::vector<std::string>& overrides) {
    std::vector<std::string> problems;
    std::map<std::string, std::string> values;
    auto put = [&](const std::string& key, const std::string& value) {
        std::string why;
        if (auto k = canonical_key(key, why)) values[*k] = trim(value);
        else problems.push_back(why);
    };

    boost::property_tree::ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("malformed config (line " + std::to_string(e.line()) + "): " + e.message());
    }
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            put(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            if (!leaf.empty()) problems.push_back("nested sections are not supported: " + name + "." + key);
            else put(name + "." + key, leaf.data());
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            problems.push_back("override '" + o + "' is not key=value");
            continue;
        }
        put(trim(o.substr(0, eq)), o.substr(eq + 1));
    }

    RunConfig cfg;
    cfg.command = command;
    cfg.explicit_values = values;
    const Reader r(values, problems);

    std::string out = "out";
    r.string("run.output_dir", out);
    cfg.output_dir = fs::absolute(out).lexically_normal();
    r.u64("run.seed", cfg.seed);
    r.integer("run.workers", cfg.workers);
    if (cfg.workers < 1) problems.push_back("run.workers must be at least 1");

    // Model: the dimension follows the kernel unless given explicitly.
    std::string kernel = "biot-savart-2d";
    r.string("model.kernel", kernel);
    double sign = 1.0;
    r.real("model.kernel_sign", sign);
    if (sign != 1.0 && sign != -1.0) problems.push_back("model.kernel_sign must be +1 or -1");
    int kernel_dim = 2;
    try {
        kernel_dim = KernelSpec::builtin(kernel).dim();
    } catch (const Error&) {
        problems.push_back("model.kernel: unknown kernel '" + kernel + "'");
    }
    int dim = kernel_dim;
    r.integer("model.n", dim);
    if (dim != 2 && dim != 3) problems.push_back("model.n must be 2 or 3");
    else if (dim != kernel_dim)
        problems.push_back("dimension mismatch: kernel " + kernel + " is " + std::to_string(kernel_dim) +
                           "-dimensional but n = " + std::to_string(dim));
    if (dim != 2 && dim != 3) dim = kernel_dim;
    double gamma = 0.5;
    r.real("model.gamma", gamma);
    check_gamma(gamma, problems);
    double h = 1.0 / 32;
    r.real("lattice.h", h);
    if (!(h > 0.0)) problems.push_back("lattice.h must be positive");

    auto check_preset = [&](const std::string& sec, const DensitySpec& d) {
        const auto names = density_preset_names();
        if (std::find(names.begin(), names.end(), d.preset) == names.end())
            problems.push_back(sec + ".preset: unknown preset '" + d.preset + "'");
    };
    auto check_eval = [&](double spacing, double half) {
        if (!(spacing > 0.0)) problems.push_back("eval.spacing must be positive");
        if (!(half > 0.0)) problems.push_back("eval.half_extent must be positive");
    };

    // simulate
    {
        auto& s = cfg.simulate;
        s.kernel = kernel;
        s.kernel_sign = sign;
        s.dim = dim;
        s.gamma = gamma;
        s.h = h;
        s.eval_spacing = 1.0 / 32;
        s.eval_half_extent = 1.0;
        read_density(r, "density", s.density, dim);
        read_solver(r, s.solver);
        s.solver.phi_pairs.seed = cfg.seed;
        s.solver.workers = cfg.workers;
        r.parsed("solver.interpolation", [&](const std::string& v) { s.interpolation = parse_interpolation(v); });
        r.boolean("solver.round_trip", s.round_trip);
        s.solver.store_replay = s.round_trip;
        r.parsed("solver.replay", [&](const std::string& v) {
            if (v == "cubic") s.replay = ReplayInterpolation::cubic;
            else if (v == "linear") s.replay = ReplayInterpolation::linear;
            else throw ConfigError("expected cubic or linear, got '" + v + "'");
        });
        r.real("eval.spacing", s.eval_spacing);
        r.real("eval.half_extent", s.eval_half_extent);
        if (command == Command::simulate) {
            check_solver(s.solver, problems);
            check_preset("density", s.density);
            check_eval(s.eval_spacing, s.eval_half_extent);
        }
    }

    // continuity
    {
        NormKind kind = NormKind::holder;
        r.parsed("sweep.norm_kind", [&](const std::string& v) { kind = parse_norm_kind(v); });
        auto& w = cfg.sweep;
        w = kind == NormKind::zygmund ? ContinuitySweepConfig::zygmund_default() : ContinuitySweepConfig::holder_default();
        w.kernel = kernel;
        w.kernel_sign = sign;
        w.dim = dim;
        w.gamma = gamma;
        if (r.has("lattice.h")) w.h = h;
        read_density(r, "density", w.base, dim);
        read_density(r, "perturbation", w.perturbation, dim);
        read_solver(r, w.solver);
        if (!r.has("solver.checkpoints")) {
            // shipped checkpoints beyond a shortened T fall back to T itself
            auto& cp = w.solver.checkpoint_times;
            std::erase_if(cp, [&](double t) { return t > w.solver.T; });
            if (cp.empty()) cp.push_back(w.solver.T);
        }
        w.solver.phi_pairs.seed = cfg.seed;
        r.parsed("solver.interpolation", [&](const std::string& v) { w.interpolation = parse_interpolation(v); });
        r.list("sweep.epsilons", w.epsilons);
        r.real("eval.spacing", w.eval_spacing);
        r.real("eval.half_extent", w.eval_half_extent);
        w.seed = cfg.seed;
        w.workers = cfg.workers;
        if (command == Command::continuity) {
            check_solver(w.solver, problems);
            check_preset("density", w.base);
            check_preset("perturbation", w.perturbation);
            check_eval(w.eval_spacing, w.eval_half_extent);
            if (w.epsilons.empty()) problems.push_back("sweep.epsilons must not be empty");
            for (std::size_t k = 0; k < w.epsilons.size(); ++k) {
                const bool trailing_zero = w.epsilons[k] == 0.0 && k + 1 == w.epsilons.size();
                if (!(w.epsilons[k] > 0.0) && !trailing_zero)
                    problems.push_back("sweep.epsilons must be positive (0 only as the last entry)");
                if (k > 0 && !(w.epsilons[k] < w.epsilons[k - 1]))
                    problems.push_back("sweep.epsilons must be strictly decreasing");
            }
        }
    }

    // convergence
    {
        auto& c = cfg.convergence;
        r.string("convergence.case", c.case_name);
        r.list("convergence.h_list", c.h_list);
        r.list("convergence.dt_list", c.dt_list);
        r.real("solver.T", c.T);
        r.parsed("solver.interpolation", [&](const std::string& v) { c.interpolation = parse_interpolation(v); });
        c.workers = cfg.workers;
        if (command == Command::convergence) {
            try {
                c = c.resolved();
            } catch (const ConfigError& e) {
                problems.push_back(std::string("convergence: ") + e.what());
            }
        }
    }

    // norms
    {
        auto& n = cfg.norms;
        n.dim = dim;
        n.gamma = gamma;
        std::string in;
        r.string("norms.input", in);
        if (!in.empty()) n.input = fs::absolute(in).string();
        r.real("norms.lattice_spacing", n.lattice_spacing);
        r.list("norms.h_levels", n.h_levels);
        if (command == Command::norms) {
            if (n.input.empty()) problems.push_back("norms.input is required");
            if (n.lattice_spacing < 0.0) problems.push_back("norms.lattice_spacing must be nonnegative");
            for (double v : n.h_levels)
                if (!(v > 0.0)) problems.push_back("norms.h_levels must be positive");
        }
    }

    // validate-kernels
    {
        auto& k = cfg.kernels;
        k.kernel_sign = sign;
        if (r.has("kernels.names")) k.kernels = split(values.at("kernels.names"), ',');
        r.integer("kernels.quadrature_order", k.quadrature_order);
        r.integer("kernels.samples", k.samples);
        if (command == Command::validate_kernels) {
            const auto names = KernelSpec::builtin_names();
            for (const auto& n : k.kernels)
                if (std::find(names.begin(), names.end(), n) == names.end())
                    problems.push_back("kernels.names: unknown kernel '" + n + "'");
            if (k.quadrature_order < 8) problems.push_back("kernels.quadrature_order must be at least 8");
            if (k.samples < 1) problems.push_back("kernels.samples must be at least 1");
        }
    }

    // validate-sio
    {
        auto& s = cfg.sio;
        s.kernel = kernel;
        s.kernel_sign = sign;
        s.gamma = gamma;
        int i1 = s.i + 1, j1 = s.j + 1;
        r.integer("sio.i", i1);
        r.integer("sio.j", j1);
        s.i = i1 - 1;
        s.j = j1 - 1;
        r.list("sio.widths", s.widths);
        r.list("sio.h_list", s.h_list);
        r.real("sio.epsilon_factor", s.epsilon_factor);
        if (command == Command::validate_sio) {
            if (i1 < 1 || i1 > dim || j1 < 1 || j1 > dim)
                problems.push_back("sio.i and sio.j must lie in 1.." + std::to_string(dim));
            for (double v : s.widths)
                if (!(v > 0.0)) problems.push_back("sio.widths must be positive");
            for (double v : s.h_list)
                if (!(v > 0.0)) problems.push_back("sio.h_list must be positive");
            if (!(s.epsilon_factor >= 1.0)) problems.push_back("sio.epsilon_factor must be at least 1");
        }
    }

    // lemmas
    cfg.lemmas.seed = cfg.seed;
    cfg.lemmas.workers = cfg.workers;
    r.integer("lemmas.trials", cfg.lemmas.trials);
    if (command == Command::lemmas && cfg.lemmas.trials < 0) problems.push_back("lemmas.trials must be nonnegative");

    if (!problems.empty()) {
        // shared keys are read once per setup; report each problem once
        std::vector<std::string> unique;
        for (const auto& p : problems)
            if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(p);
        problems = std::move(unique);
        std::ostringstream os;
        os << "invalid configuration (" << problems.size() << (problems.size() == 1 ? " problem" : " problems") << "):";
        for (const auto& p : problems) os << "\n  - " << p;
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig parse_config(Command command, const std::optional<fs::path>& file, const std::vector<std::string>& overrides) {
    std::string text;
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file " + file->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_text(command, text, overrides);
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string CsvTable::render() const {
    std::string out = "# schema: " + schema + "\n";
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + row[k];
        out += "\n";
    }
    return out;
}

CsvTable read_csv(const fs::path& path, const std::string& expect_schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# schema:";
            if (line.rfind(tag, 0) == 0 && t.schema.empty()) t.schema = trim(line.substr(tag.size()));
            continue;
        }
        if (!have_header) {
            t.header = split(line, ',');
            have_header = true;
        } else {
            t.rows.push_back(split(line, ','));
        }
    }
    if (!expect_schema.empty() && t.schema != expect_schema)
        throw IoError(path.string() + ": schema '" + t.schema + "' does not match expected '" + expect_schema + "'");
    return t;
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw IoError("missing CSV column '" + name + "'");
    const auto c = static_cast<std::size_t>(it - t.header.begin());
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        if (c >= row.size()) throw IoError("short CSV row");
        try {
            out.push_back(parse_real(row[c]));
        } catch (const Error&) {
            if (row[c] == "nan") out.push_back(std::nan(""));
            else if (row[c] == "inf") out.push_back(INFINITY);
            else if (row[c] == "-inf") out.push_back(-INFINITY);
            else throw IoError("non-numeric value '" + row[c] + "' in column " + name);
        }
    }
    return out;
}

SampledField read_sampled_field(const fs::path& path, int dim, double lattice_spacing) {
    const CsvTable t = read_csv(path);
    std::vector<std::vector<double>> cols;
    for (int d = 1; d <= dim; ++d) cols.push_back(column(t, "x_" + std::to_string(d)));
    const auto val = column(t, "value");
    std::vector<Point> pts(val.size(), Point{0, 0, 0});
    for (std::size_t k = 0; k < val.size(); ++k)
        for (int d = 0; d < dim; ++d) pts[k][d] = cols[static_cast<std::size_t>(d)][k];
    if (!(lattice_spacing > 0.0)) {
        auto f = SampledField::scattered(dim, std::move(pts), val);
        f.validate();
        return f;
    }
    const double h = lattice_spacing;
    LatticeGeometry geom;
    geom.dim = dim;
    geom.h = h;
    std::array<long, 3> hi{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        geom.lo[d] = LONG_MAX;
        hi[d] = LONG_MIN;
        for (const auto& p : pts) {
            geom.lo[d] = std::min(geom.lo[d], std::lround(p[d] / h));
            hi[d] = std::max(hi[d], std::lround(p[d] / h));
        }
        geom.count[d] = hi[d] - geom.lo[d] + 1;
    }
    if (geom.size() != val.size())
        throw DomainError(path.string() + ": samples do not fill a lattice of spacing " + format_real(h));
    std::vector<double> values(geom.size(), std::nan(""));
    for (std::size_t k = 0; k < pts.size(); ++k) {
        std::array<long, 3> m{0, 0, 0};
        for (int d = 0; d < dim; ++d) {
            m[d] = std::lround(pts[k][d] / h) - geom.lo[d];
            if (std::abs(pts[k][d] - static_cast<double>(m[d] + geom.lo[d]) * h) > 1e-9 * h)
                throw DomainError(path.string() + ": sample off the lattice");
        }
        if (!std::isnan(values[geom.flat_index(m)])) throw DomainError(path.string() + ": duplicate lattice sample");
        values[geom.flat_index(m)] = val[k];
    }
    auto f = SampledField::on_lattice(geom, std::move(values));
    f.validate();
    return f;
}

// ---------------------------------------------------------------------------
// Digests and the output directory

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 failed");
    std::ostringstream os;
    for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
    return os.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

void write_atomically(const fs::path& target, const std::string& bytes) {
    fs::path tmp = target;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + target.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + target.string());
    }
}

}  // namespace

OutputWriter::OutputWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
}

OutputWriter::~OutputWriter() {
    if (!finished_) abort();
}

void OutputWriter::write_file(const std::string& name, const std::string& schema, const std::string& bytes) {
    try {
        write_atomically(dir_ / name, bytes);
    } catch (...) {
        abort();
        throw;
    }
    files_.push_back({name, schema, bytes.size(), sha256_hex(bytes)});
}

void OutputWriter::write_csv(const std::string& name, const CsvTable& table) {
    write_file(name, table.schema, table.render());
}

void OutputWriter::write_json(const std::string& name, const std::string& schema, const std::string& json_text) {
    write_file(name, schema, json_text);
}

void OutputWriter::abort() {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(dir_ / f.name, ec);
    fs::remove(dir_ / "manifest.json", ec);
    files_.clear();
    finished_ = true;
}

RunManifest OutputWriter::finish(RunManifest m) {
    m.files = files_;
    m.finished = utc_timestamp();
    try {
        write_atomically(dir_ / "manifest.json", manifest_json(m));
    } catch (...) {
        abort();
        throw;
    }
    finished_ = true;
    return m;
}

std::string manifest_json(const RunManifest& m) {
    json j;
    j["schema"] = "nlt-manifest/" + std::to_string(kSchemaVersion);
    j["tool"] = m.tool;
    j["version"] = m.version;
    j["command"] = m.command;
    j["config"] = json::object();
    for (const auto& [k, v] : m.config) j["config"][k] = v;
    j["seed"] = m.seed;
    j["workers"] = m.workers;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["halt_reason"] = m.halt_reason;
    j["exit_code"] = m.exit_code;
    j["files"] = json::array();
    for (const auto& f : m.files)
        j["files"].push_back({{"name", f.name}, {"schema", f.schema}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    return j.dump(2) + "\n";
}

RunManifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    RunManifest m;
    m.tool = j.value("tool", "");
    m.version = j.value("version", "");
    m.command = j.value("command", "");
    for (const auto& [k, v] : j["config"].items()) m.config[k] = v.get<std::string>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.workers = j.value("workers", 1);
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.halt_reason = j.value("halt_reason", "");
    m.exit_code = j.value("exit_code", 0);
    for (const auto& f : j["files"])
        m.files.push_back({f["name"].get<std::string>(), f["schema"].get<std::string>(), f["bytes"].get<std::uintmax_t>(),
                           f["sha256"].get<std::string>()});
    return m;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string schema(const char* name) { return std::string("nlt-") + name + "/" + std::to_string(kSchemaVersion); }

std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<std::string> axis_names(const char* prefix, int dim) {
    std::vector<std::string> out;
    for (int d = 1; d <= dim; ++d) out.push_back(prefix + std::to_string(d));
    return out;
}

struct SnapshotRef {
    int step;
    const FlowState* state;
};

/// Snapshots plus the final state when it is not already the last snapshot.
std::vector<SnapshotRef> snapshot_list(const TrajectoryRecord& rec) {
    std::vector<SnapshotRef> out;
    for (const auto& s : rec.snapshots) out.push_back({s.step, &s.state});
    if (!rec.final_state.X.empty()) {
        const int step = rec.dt > 0.0 ? static_cast<int>(std::lround(rec.final_state.t / rec.dt)) : 0;
        if (out.empty() || out.back().step != step) out.push_back({step, &rec.final_state});
    }
    return out;
}

json inequality_summaries(const InequalityReport& r) {
    json a = json::array();
    for (const auto& s : r.summaries)
        a.push_back({{"name", s.name},
                     {"constant_free", s.constant_free},
                     {"checks", s.checks},
                     {"failures", s.failures},
                     {"max_ratio", s.max_ratio},
                     {"worst_slack", s.worst_slack},
                     {"max_ratio_refined", s.max_ratio_refined},
                     {"worst_seed", s.worst_seed},
                     {"passed", s.passed}});
    return a;
}

}  // namespace

CsvTable markers_table(const TrajectoryRecord& rec, const MarkerLattice& lat) {
    const int dim = lat.dim();
    CsvTable t;
    t.schema = schema("markers");
    t.header = {"step", "t", "marker"};
    for (auto& s : axis_names("alpha_", dim)) t.header.push_back(s);
    for (auto& s : axis_names("x_", dim)) t.header.push_back(s);
    t.header.push_back("rho0");
    t.header.push_back("det_dx");
    const auto labels = lat.labels();
    for (const auto& snap : snapshot_list(rec)) {
        const FlowState& s = *snap.state;
        for (std::size_t k = 0; k < s.X.size(); ++k) {
            std::vector<std::string> row{std::to_string(snap.step), format_real(s.t), std::to_string(k + 1)};
            for (int d = 0; d < dim; ++d) row.push_back(format_real(labels[k][d]));
            for (int d = 0; d < dim; ++d) row.push_back(format_real(s.X[k][d]));
            row.push_back(format_real(lat.rho0[k]));
            row.push_back(format_real(k < s.detDX.size() ? s.detDX[k] : 1.0));
            t.add(std::move(row));
        }
    }
    return t;
}

CsvTable monitors_table(const TrajectoryRecord& rec) {
    CsvTable t;
    t.schema = schema("monitors");
    t.header = {"step", "t", "min_det_dx", "phi_norm", "max_speed", "picard_iterations"};
    for (const auto& m : rec.monitors)
        t.add({std::to_string(m.step), format_real(m.t), format_real(m.min_detDX), format_real(m.phi_norm),
               format_real(m.max_speed), std::to_string(m.picard_iterations)});
    return t;
}

CsvTable density_table(const TrajectoryRecord& rec, const MarkerLattice& lat, const LatticeGeometry& eval,
                       Interpolation method) {
    const int dim = lat.dim();
    CsvTable t;
    t.schema = schema("density");
    t.header = {"step", "t"};
    for (auto& s : axis_names("x_", dim)) t.header.push_back(s);
    t.header.push_back("rho");
    const auto pts = eval.nodes();
    for (const auto& snap : snapshot_list(rec)) {
        if (!snap.state->admissible) continue;
        const auto rho = reconstruct_density(*snap.state, lat, pts, method, eval);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            std::vector<std::string> row{std::to_string(snap.step), format_real(snap.state->t)};
            for (int d = 0; d < dim; ++d) row.push_back(format_real(pts[q][d]));
            row.push_back(format_real(rho.values[q]));
            t.add(std::move(row));
        }
    }
    return t;
}

CsvTable sweep_table(const SweepReport& rep) {
    CsvTable t;
    t.schema = schema("sweep");
    t.header = {"epsilon", "input_distance", "output_distance", "flow_distance", "admissible_to_T"};
    for (const auto& r : rep.rows)
        t.add({format_real(r.epsilon), format_real(r.input_distance), format_real(r.output_distance),
               format_real(r.flow_distance), flag(r.admissible_to_T)});
    return t;
}

std::string sweep_fit_json(const SweepReport& rep) {
    json j;
    j["schema"] = schema("sweep-fit");
    j["norm_kind"] = to_string(rep.norm_kind);
    j["beta"] = rep.fit.beta;
    j["r_squared"] = rep.fit.r_squared;
    j["spearman"] = rep.fit.spearman;
    j["points"] = rep.fit.points;
    j["strictly_decreasing"] = rep.strictly_decreasing;
    j["base_admissible"] = rep.base_admissible;
    return j.dump(2) + "\n";
}

CsvTable convergence_table(const ConvergenceReport& rep) {
    CsvTable t;
    t.schema = schema("convergence");
    t.header = {"case", "quantity", "h", "dt", "error"};
    for (const auto& r : rep.rows)
        t.add({r.case_name, r.quantity, format_real(r.h), format_real(r.dt), format_real(r.error)});
    return t;
}

CsvTable orders_table(const ConvergenceReport& rep) {
    CsvTable t;
    t.schema = schema("orders");
    t.header = {"case", "axis", "observed_order", "required_order", "monotone", "passed"};
    t.add({rep.case_name, rep.axis, format_real(rep.observed_order), format_real(rep.required_order), flag(rep.monotone),
           flag(rep.passed)});
    return t;
}

CsvTable kernels_table(const std::vector<KernelValidation>& v) {
    CsvTable t;
    t.schema = schema("kernels");
    t.header = {"kernel", "homogeneity_residual", "grad_homogeneity_residual", "grad_fd_residual", "max_spherical_mean",
                "trace", "passed"};
    for (const auto& k : v) {
        double sm = 0.0;
        for (const auto& row : k.spherical_mean_residuals)
            for (double x : row) sm = std::max(sm, x);
        t.add({k.kernel, format_real(k.homogeneity_residual), format_real(k.grad_homogeneity_residual),
               format_real(k.grad_fd_residual), format_real(sm), format_real(k.c.trace()), flag(k.passed)});
    }
    return t;
}

CsvTable dirac_table(const std::vector<KernelValidation>& v) {
    CsvTable t;
    t.schema = schema("dirac");
    t.header = {"kernel", "i", "j", "c", "estimated_error", "quadrature_order"};
    for (const auto& k : v)
        for (int i = 0; i < k.c.dim; ++i)
            for (int j = 0; j < k.c.dim; ++j)
                t.add({k.kernel, std::to_string(i + 1), std::to_string(j + 1), format_real(k.c(i, j)),
                       format_real(k.c.estimated_error), std::to_string(k.c.quadrature_order)});
    return t;
}

CsvTable sio_table(const std::vector<SIOReport>& reports) {
    CsvTable t;
    t.schema = schema("sio");
    t.header = {"kernel", "i", "j", "field_id", "h", "epsilon", "R", "sup_f", "seminorm_f", "sup_S", "seminorm_S",
                "implied_c_eps", "implied_c_sna", "skipped"};
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            t.add({rep.kernel, std::to_string(rep.i + 1), std::to_string(rep.j + 1), r.field_id, format_real(r.h),
                   format_real(r.epsilon), format_real(r.R), format_real(r.sup_f), format_real(r.seminorm_f),
                   format_real(r.sup_S), format_real(r.seminorm_S), format_real(r.implied_c_eps),
                   format_real(r.implied_c_sna), flag(r.skipped)});
    return t;
}

CsvTable modulus_table(const NormReport& rep) {
    CsvTable t;
    t.schema = schema("modulus");
    t.header = {"kind", "h", "omega"};
    for (const auto& p : rep.vanishing_modulus) t.add({"holder", format_real(p.h), format_real(p.omega)});
    for (const auto& p : rep.zygmund_modulus) t.add({"zygmund", format_real(p.h), format_real(p.omega)});
    return t;
}

std::string norms_json(const NormReport& rep) {
    json j;
    j["schema"] = schema("norms");
    j["gamma"] = rep.gamma;
    j["sup_norm"] = rep.sup_norm;
    j["holder_seminorm"] = rep.holder_seminorm;
    j["holder_norm"] = rep.sup_norm + rep.holder_seminorm;
    if (rep.zygmund_seminorm) j["zygmund_seminorm"] = *rep.zygmund_seminorm;
    else j["zygmund_seminorm"] = nullptr;
    j["spacing"] = rep.spacing;
    return j.dump(2) + "\n";
}

CsvTable inequalities_table(const LemmaSuiteReport& rep) {
    CsvTable t;
    t.schema = schema("inequalities");
    t.header = {"suite", "name", "trial", "seed", "lhs", "rhs", "ratio", "passed"};
    for (const auto* suite : {&rep.holder, &rep.zygmund})
        for (const auto& r : suite->records)
            t.add({suite == &rep.holder ? "holder" : "zygmund", r.name, std::to_string(r.trial), std::to_string(r.seed),
                   format_real(r.lhs), format_real(r.rhs), format_real(r.ratio), flag(r.passed)});
    return t;
}

std::string lemmas_json(const LemmaSuiteReport& rep) {
    json j;
    j["schema"] = schema("lemmas");
    j["trials"] = rep.trials;
    j["seed"] = rep.seed;
    j["passed"] = rep.passed;
    j["holder"] = inequality_summaries(rep.holder);
    j["zygmund"] = inequality_summaries(rep.zygmund);
    j["dirac"] = json::array();
    for (const auto& d : rep.dirac) {
        json c = json::array();
        for (int i = 0; i < d.c.dim; ++i) {
            json row = json::array();
            for (int k = 0; k < d.c.dim; ++k) row.push_back(d.c(i, k));
            c.push_back(row);
        }
        j["dirac"].push_back(
            {{"kernel", d.kernel}, {"c", c}, {"trace", d.c.trace()}, {"expected_trace", d.expected_trace}, {"passed", d.passed}});
    }
    j["sio"] = json::array();
    for (const auto& s : rep.sio)
        j["sio"].push_back({{"kernel", s.coarse.kernel},
                            {"i", s.coarse.i + 1},
                            {"j", s.coarse.j + 1},
                            {"max_constant", s.max_constant},
                            {"max_drift", s.max_drift},
                            {"passed", s.passed}});
    return j.dump(2) + "\n";
}

}  // namespace nlt
