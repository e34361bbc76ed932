#include <doctest.h>

#include <cmath>

#include "nlt/flow.hpp"

using namespace nlt;

namespace {

MarkerLattice gaussian_lattice(double h, double amplitude = 1.0) {
    PresetParams p;
    p.amplitude = amplitude;
    return MarkerLattice::from_profile(make_density("gaussian", 2, p), h, 0.5);
}

MarkerLattice perturbed_lattice(double h) {
    PresetParams b, q;
    q.sigma = 0.08;
    q.center = {0.25, 0.1, 0.0};
    q.amplitude = 0.5;
    return MarkerLattice::from_profile(perturbed(make_density("gaussian", 2, b), make_density("gaussian", 2, q), 1.0),
                                       h, 0.5);
}

SolverConfig solver(double dt, double T) {
    SolverConfig s;
    s.dt = dt;
    s.T = T;
    s.delta = 1e9;
    return s;
}

double max_diff(const std::vector<Point>& a, const std::vector<Point>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (int d = 0; d < 3; ++d) m = std::max(m, std::abs(a[k][d] - b[k][d]));
    return m;
}

}  // namespace

TEST_CASE("marker lattice construction and validation") {
    const auto lat = gaussian_lattice(1.0 / 16);
    CHECK_NOTHROW(lat.validate());
    CHECK(lat.size() == lat.geom.size());
    auto bad = lat.rho0;
    bad[0] = 1.0;
    CHECK_THROWS_AS(MarkerLattice::from_values(lat.geom, bad, 0.5), DomainError);
    CHECK_THROWS_AS(MarkerLattice::from_values(lat.geom, lat.rho0, 1.0), DomainError);
    CHECK_THROWS_AS(MarkerLattice::from_values(lat.geom, std::vector<double>(3, 0.0), 0.5), DomainError);
}

TEST_CASE("integrator and interpolation names") {
    CHECK(parse_integrator("rk4") == Integrator::rk4);
    CHECK(parse_integrator("picard") == Integrator::picard);
    CHECK_THROWS_AS(parse_integrator("euler"), ConfigError);
    CHECK(parse_interpolation("idw") == Interpolation::idw);
    CHECK(parse_interpolation("inverse-map") == Interpolation::inverse_map);
    CHECK(to_string(Interpolation::inverse_map) == "inverse-map");
    CHECK_THROWS_AS(parse_interpolation("spline"), ConfigError);
}

TEST_CASE("deformation gradient of an affine map is exact") {
    const auto geom = LatticeGeometry::centered(2, 0.125, 6);
    const auto a = geom.nodes();
    std::vector<Point> X(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        X[k] = {1.5 * a[k][0] + 0.25 * a[k][1] + 0.3, -0.5 * a[k][0] + 0.75 * a[k][1] - 0.1, 0.0};
    std::vector<Mat3> DX;
    std::vector<double> det;
    deformation_gradient(X, geom, DX, det);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(at(DX[k], 0, 0) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(at(DX[k], 0, 1) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(at(DX[k], 1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(at(DX[k], 1, 1) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(det[k] == doctest::Approx(1.25).epsilon(1e-12));
    }
}

TEST_CASE("initial state is the identity") {
    const auto lat = gaussian_lattice(1.0 / 16);
    const auto s = initial_state(lat);
    const auto labels = lat.labels();
    CHECK(max_diff(s.X, labels) == 0.0);
    CHECK(s.min_detDX == 1.0);
    CHECK(s.phi_norm == 0.0);
    CHECK(s.admissible);
}

TEST_CASE("non-finite marker positions are rejected") {
    const auto lat = gaussian_lattice(1.0 / 16);
    auto s = initial_state(lat);
    s.X[5][0] = std::nan("");
    CHECK_THROWS_AS(velocity_from_state(s, lat, KernelSpec::builtin("biot-savart-2d")), NumericalError);
}

TEST_CASE("radial Gaussian under Biot-Savart rotates rigidly on circles") {
    const auto lat = gaussian_lattice(1.0 / 32);
    const auto rec = simulate(lat, KernelSpec::builtin("biot-savart-2d"), solver(0.05, 0.5));
    REQUIRE(rec.completed);
    const auto labels = lat.labels();
    double radial = 0.0, detdev = 0.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        radial = std::max(radial, std::abs(norm(rec.final_state.X[k], 2) - norm(labels[k], 2)));
        detdev = std::max(detdev, std::abs(rec.final_state.detDX[k] - 1.0));
    }
    CHECK(radial < 1e-3);
    CHECK(detdev < 0.02);
}

TEST_CASE("simulate: step count, checkpoints and monitors") {
    const auto lat = gaussian_lattice(1.0 / 16);
    auto cfg = solver(0.03, 0.3);
    cfg.checkpoint_times = {0.1, 0.3};
    const auto rec = simulate(lat, KernelSpec::builtin("biot-savart-2d"), cfg);
    REQUIRE(rec.completed);
    CHECK(rec.halt_reason == "completed");
    CHECK(rec.final_state.t == doctest::Approx(0.3));
    REQUIRE(rec.snapshots.size() == 3);
    CHECK(rec.snapshots[0].step == 0);
    // 0.1 / 0.03 = 3.33: nearest step is 3, the recorded time is the step time
    CHECK(rec.snapshots[1].step == 3);
    CHECK(rec.snapshots[1].requested_t == 0.1);
    CHECK(rec.snapshots[1].state.t == doctest::Approx(0.09));
    CHECK(rec.snapshots[2].step == 10);
    CHECK(rec.monitors.size() == 11);
    CHECK(rec.monitors.front().t == 0.0);
    CHECK(rec.monitors.back().step == 10);
    for (const auto& m : rec.monitors) CHECK(m.max_speed > 0.0);
}

TEST_CASE("leaving U_delta halts the run") {
    const auto lat = gaussian_lattice(1.0 / 16);
    auto cfg = solver(0.05, 1.0);
    cfg.delta = 0.05;
    const auto rec = simulate(lat, KernelSpec::builtin("biot-savart-2d"), cfg);
    CHECK_FALSE(rec.completed);
    CHECK(rec.halt_reason == "left U_delta");
    CHECK(rec.final_state.t < 1.0);
}

TEST_CASE("grad N expands the plateau with det DX = exp(rho0 t)") {
    PresetParams p;
    const auto lat = MarkerLattice::from_profile(make_density("mollified-disk", 2, p), 1.0 / 32, 0.5);
    const auto rec = simulate(lat, KernelSpec::builtin("grad-newtonian-2d"), solver(0.05, 0.5));
    REQUIRE(rec.completed);
    double worst = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k)
        if (lat.rho0[k] == 1.0)
            worst = std::max(worst, std::abs(rec.final_state.detDX[k] / std::exp(0.5) - 1.0));
    CHECK(worst < 0.02);
}

TEST_CASE("density reconstruction is exact at markers and zero far away") {
    const auto lat = perturbed_lattice(1.0 / 16);
    const auto rec = simulate(lat, KernelSpec::builtin("biot-savart-2d"), solver(0.05, 0.2));
    REQUIRE(rec.completed);
    std::vector<Point> pts(rec.final_state.X.begin(), rec.final_state.X.begin() + 200);
    pts.push_back({50.0, 50.0, 0.0});
    for (auto m : {Interpolation::idw, Interpolation::inverse_map}) {
        const auto rho = reconstruct_density(rec.final_state, lat, pts, m);
        for (std::size_t k = 0; k < 200; ++k) CHECK(rho.values[k] == doctest::Approx(lat.rho0[k]).epsilon(1e-9));
        CHECK(rho.values.back() == 0.0);
    }
}

TEST_CASE("RK4 self-convergence is fourth order") {
    const auto lat = perturbed_lattice(1.0 / 16);
    const auto k = KernelSpec::builtin("biot-savart-2d");
    std::vector<std::vector<Point>> X;
    for (double dt : {0.2, 0.1, 0.05}) X.push_back(simulate(lat, k, solver(dt, 1.0)).final_state.X);
    const double r = max_diff(X[0], X[1]) / max_diff(X[1], X[2]);
    CHECK(std::log2(r) >= 3.5);
}

TEST_CASE("Picard step agrees with RK4 to third order") {
    const auto lat = perturbed_lattice(1.0 / 16);
    const auto k = KernelSpec::builtin("biot-savart-2d");
    auto cfg = solver(0.1, 1.0);
    const auto s0 = initial_state(lat, cfg.delta);
    std::vector<double> diffs;
    for (double dt : {0.08, 0.04, 0.02}) {
        const auto a = step_rk4(s0, lat, k, dt, cfg);
        const auto b = step_picard(s0, lat, k, dt, cfg);
        CHECK(b.iterations >= 1);
        diffs.push_back(max_diff(a.X, b.state.X));
    }
    CHECK(diffs[0] / diffs[1] >= 6.0);
    CHECK(diffs[1] / diffs[2] >= 6.0);
}

TEST_CASE("Picard rejects a step that cannot contract") {
    const auto lat = gaussian_lattice(1.0 / 16, 50.0);
    auto cfg = solver(10.0, 10.0);
    cfg.integrator = Integrator::picard;
    CHECK_THROWS_AS(step_picard(initial_state(lat, cfg.delta), lat, KernelSpec::builtin("biot-savart-2d"), 10.0, cfg),
                    PicardRejection);
}

TEST_CASE("forward-backward round trip converges at least 8x per halving") {
    const auto lat = perturbed_lattice(1.0 / 16);
    const auto k = KernelSpec::builtin("biot-savart-2d");
    std::vector<double> err;
    for (double dt : {0.2, 0.1, 0.05}) {
        auto cfg = solver(dt, 1.0);
        cfg.store_replay = true;
        err.push_back(invert_flow_check(simulate(lat, k, cfg), lat).max_error);
    }
    CHECK(err[0] / err[1] >= 8.0);
    CHECK(err[1] / err[2] >= 8.0);
}

TEST_CASE("worker count does not change trajectories") {
    const auto lat = perturbed_lattice(1.0 / 16);
    const auto k = KernelSpec::builtin("biot-savart-2d");
    auto cfg = solver(0.05, 0.2);
    const auto a = simulate(lat, k, cfg);
    cfg.workers = 3;
    const auto b = simulate(lat, k, cfg);
    CHECK(max_diff(a.final_state.X, b.final_state.X) == 0.0);
    CHECK(a.final_state.phi_norm == b.final_state.phi_norm);
}
