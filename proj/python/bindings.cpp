#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nlt/io.hpp"

namespace py = pybind11;
using namespace nlt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> to_points(const Array& a, int dim) {
    if (a.ndim() != 2 || a.shape(1) != dim)
        throw DomainError("points must have shape (N, " + std::to_string(dim) + ")");
    auto r = a.unchecked<2>();
    std::vector<Point> out(static_cast<std::size_t>(a.shape(0)), Point{0, 0, 0});
    for (py::ssize_t k = 0; k < a.shape(0); ++k)
        for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(k)][d] = r(k, d);
    return out;
}

Array from_points(const std::vector<Point>& p, int dim) {
    Array a({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(dim)});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t k = 0; k < p.size(); ++k)
        for (int d = 0; d < dim; ++d) w(static_cast<py::ssize_t>(k), d) = p[k][d];
    return a;
}

Array from_vector(const std::vector<double>& v) {
    Array a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

Array from_matrix(const Mat3& m, int dim) {
    Array a({dim, dim});
    auto w = a.mutable_unchecked<2>();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) w(i, j) = at(m, i, j);
    return a;
}

py::dict state_dict(const FlowState& s, int dim) {
    py::dict d;
    d["t"] = s.t;
    d["X"] = from_points(s.X, dim);
    d["detDX"] = from_vector(s.detDX);
    d["min_detDX"] = s.min_detDX;
    d["phi_norm"] = s.phi_norm;
    d["admissible"] = s.admissible;
    return d;
}

py::dict simulate_py(const std::vector<std::string>& overrides) {
    const auto cfg = parse_config_text(Command::simulate, "", overrides);
    const auto& s = cfg.simulate;
    const auto lat = MarkerLattice::from_profile(s.density.build(s.dim), s.h, s.gamma);
    TrajectoryRecord rec;
    {
        py::gil_scoped_release release;
        rec = simulate(lat, KernelSpec::builtin(s.kernel, s.kernel_sign), s.solver);
    }
    py::dict out;
    out["labels"] = from_points(lat.labels(), s.dim);
    out["rho0"] = from_vector(lat.rho0);
    out["completed"] = rec.completed;
    out["halt_reason"] = rec.halt_reason;
    out["final"] = state_dict(rec.final_state, s.dim);
    py::list snaps;
    for (const auto& sn : rec.snapshots) {
        auto d = state_dict(sn.state, s.dim);
        d["step"] = sn.step;
        d["requested_t"] = sn.requested_t;
        snaps.append(d);
    }
    out["snapshots"] = snaps;
    std::vector<double> t, mind, phi, speed;
    for (const auto& m : rec.monitors) {
        t.push_back(m.t);
        mind.push_back(m.min_detDX);
        phi.push_back(m.phi_norm);
        speed.push_back(m.max_speed);
    }
    py::dict mon;
    mon["t"] = from_vector(t);
    mon["min_detDX"] = from_vector(mind);
    mon["phi_norm"] = from_vector(phi);
    mon["max_speed"] = from_vector(speed);
    out["monitors"] = mon;
    if (s.round_trip && rec.completed) out["round_trip_error"] = invert_flow_check(rec, lat, s.replay).max_error;
    return out;
}

py::dict sweep_py(const std::vector<std::string>& overrides) {
    const auto cfg = parse_config_text(Command::continuity, "", overrides);
    SweepReport rep;
    {
        py::gil_scoped_release release;
        rep = continuity_sweep(cfg.sweep);
    }
    std::vector<double> eps, in, out, fl;
    std::vector<bool> adm;
    for (const auto& r : rep.rows) {
        eps.push_back(r.epsilon);
        in.push_back(r.input_distance);
        out.push_back(r.output_distance);
        fl.push_back(r.flow_distance);
        adm.push_back(r.admissible_to_T);
    }
    py::dict d;
    d["norm_kind"] = to_string(rep.norm_kind);
    d["epsilon"] = from_vector(eps);
    d["input_distance"] = from_vector(in);
    d["output_distance"] = from_vector(out);
    d["flow_distance"] = from_vector(fl);
    d["admissible_to_T"] = adm;
    d["beta"] = rep.fit.beta;
    d["r_squared"] = rep.fit.r_squared;
    d["spearman"] = rep.fit.spearman;
    d["strictly_decreasing"] = rep.strictly_decreasing;
    return d;
}

py::dict manifest_dict(const RunManifest& m) {
    py::dict d;
    d["command"] = m.command;
    d["version"] = m.version;
    d["config"] = m.config;
    d["seed"] = m.seed;
    d["workers"] = m.workers;
    d["halt_reason"] = m.halt_reason;
    d["exit_code"] = m.exit_code;
    py::list files;
    for (const auto& f : m.files) {
        py::dict e;
        e["name"] = f.name;
        e["schema"] = f.schema;
        e["bytes"] = f.bytes;
        e["sha256"] = f.sha256;
        files.append(e);
    }
    d["files"] = files;
    return d;
}

}  // namespace

PYBIND11_MODULE(_nlt, m) {
    m.doc() = "Lagrangian particle simulator for rho_t + v . grad rho = 0, v = k * rho";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("kernel_names", &KernelSpec::builtin_names);
    m.def("density_presets", &density_preset_names);
    m.def("convergence_cases", &convergence_case_names);
    m.def("commands", &command_names);

    m.def(
        "kernel_eval",
        [](const std::string& name, const Array& pts, double sign) {
            const auto k = KernelSpec::builtin(name, sign);
            const auto p = to_points(pts, k.dim());
            std::vector<Point> out;
            for (const auto& x : p) out.push_back(k.eval(x));
            return from_points(out, k.dim());
        },
        py::arg("name"), py::arg("points"), py::arg("sign") = 1.0);

    m.def(
        "kernel_grad",
        [](const std::string& name, int i, int j, const Array& pts, double sign) {
            const auto k = KernelSpec::builtin(name, sign);
            std::vector<double> out;
            for (const auto& x : to_points(pts, k.dim())) out.push_back(k.grad_pv(i, j, x));
            return from_vector(out);
        },
        py::arg("name"), py::arg("i"), py::arg("j"), py::arg("points"), py::arg("sign") = 1.0,
        "d_i k_j at the points; i and j are 0-based");

    m.def(
        "dirac_correction",
        [](const std::string& name, int order, double sign) {
            const auto c = dirac_correction(KernelSpec::builtin(name, sign), order);
            return from_matrix(c.c, c.dim);
        },
        py::arg("name"), py::arg("order") = 256, py::arg("sign") = 1.0);

    m.def(
        "validate_kernel",
        [](const std::string& name, int order, std::uint64_t seed) {
            const auto v = validate_kernel(KernelSpec::builtin(name), order, seed);
            py::dict d;
            d["kernel"] = v.kernel;
            d["homogeneity_residual"] = v.homogeneity_residual;
            d["grad_homogeneity_residual"] = v.grad_homogeneity_residual;
            d["grad_fd_residual"] = v.grad_fd_residual;
            d["spherical_mean_residuals"] = v.spherical_mean_residuals;
            d["dirac"] = from_matrix(v.c.c, v.c.dim);
            d["passed"] = v.passed;
            return d;
        },
        py::arg("name"), py::arg("order") = 256, py::arg("seed") = 0);

    m.def(
        "holder_seminorm",
        [](const Array& pts, const Array& values, double gamma, std::uint64_t seed) {
            if (pts.ndim() != 2) throw DomainError("points must have shape (N, n)");
            const int dim = static_cast<int>(pts.shape(1));
            std::vector<double> v(values.data(), values.data() + values.size());
            PairOptions o;
            o.seed = seed;
            return holder_seminorm(SampledField::scattered(dim, to_points(pts, dim), std::move(v)), gamma, o);
        },
        py::arg("points"), py::arg("values"), py::arg("gamma") = 0.5, py::arg("seed") = 0);

    m.def(
        "zygmund_seminorm",
        [](const Array& values, double h) {
            const int dim = static_cast<int>(values.ndim());
            if (dim < 1 || dim > 3) throw DomainError("lattice values must be a 1, 2 or 3 dimensional array");
            LatticeGeometry g;
            g.dim = dim;
            g.h = h;
            for (int d = 0; d < dim; ++d) g.count[d] = values.shape(d);
            std::vector<double> v(values.data(), values.data() + values.size());
            return zygmund_seminorm(SampledField::on_lattice(g, std::move(v)));
        },
        py::arg("values"), py::arg("h"), "Zygmund seminorm of C-ordered lattice samples of spacing h");

    m.def("simulate", &simulate_py, py::arg("overrides") = std::vector<std::string>{},
          "Runs one simulation; `overrides` are key=value config entries");
    m.def("continuity_sweep", &sweep_py, py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "lemma_suite",
        [](int trials, std::uint64_t seed) {
            LemmaSuiteOptions o;
            o.trials = trials;
            o.seed = seed;
            LemmaSuiteReport r;
            {
                py::gil_scoped_release release;
                r = lemma_suite(o);
            }
            return py::module_::import("json").attr("loads")(lemmas_json(r));
        },
        py::arg("trials") = 200, py::arg("seed") = 0);

    m.def(
        "check_config",
        [](const std::string& command, const std::string& text, const std::vector<std::string>& overrides) {
            return parse_config_text(parse_command(command), text, overrides).explicit_values;
        },
        py::arg("command"), py::arg("text") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "run",
        [](const std::string& command, const std::string& text, const std::vector<std::string>& overrides) {
            const auto cfg = parse_config_text(parse_command(command), text, overrides);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_command(cfg);
            }
            return manifest_dict(r.manifest);
        },
        py::arg("command"), py::arg("text") = "", py::arg("overrides") = std::vector<std::string>{},
        "Runs a CLI command in-process and returns its manifest");
}
