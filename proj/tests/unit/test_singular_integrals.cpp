#include <doctest.h>

#include <cmath>

#include "nlt/singular_integrals.hpp"

using namespace nlt;

namespace {

SampledField disk_indicator(double h) {
    const auto g = LatticeGeometry::covering(2, h, {-1, -1, 0}, {1, 1, 0}, 2);
    return SampledField::on_lattice(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[1] < 1.0 ? 1.0 : 0.0; });
}

double gauss(const Point& x, double w) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2 * w * w)); }

}  // namespace

TEST_CASE("grad N convolved with the disk indicator equals x/2 inside") {
    const auto gn = KernelSpec::builtin("grad-newtonian-2d");
    const std::vector<Point> targets{{0.5, 0, 0}, {0.25, 0.25, 0}, {0.375, -0.125, 0}, {-0.5, 0.5, 0}};
    double prev = 1e9;
    for (int m : {16, 32, 64}) {
        const auto v = convolve_T(gn, disk_indicator(1.0 / m), targets);
        double worst = 0.0;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const double ex = targets[k][0] / 2, ey = targets[k][1] / 2;
            worst = std::max(worst, std::hypot(v[k][0] - ex, v[k][1] - ey) / std::hypot(ex, ey));
        }
        if (m == 64) CHECK(worst <= 0.02);
        CHECK(worst < prev);
        prev = worst;
    }
    const auto c = convolve_T(gn, disk_indicator(1.0 / 32), {{0, 0, 0}});
    CHECK(std::abs(c[0][0]) < 1e-14);
    CHECK(std::abs(c[0][1]) < 1e-14);
}

TEST_CASE("convolve_T on zero fields and linearity") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    const auto f = gaussian_bump_field(2, 0.25, 1.0 / 32);
    const auto zero = f.with_values(std::vector<double>(f.size(), 0.0));
    const std::vector<Point> targets{{0.1, 0.2, 0}, {0.0, 0.0, 0}, {0.33, -0.2, 0}};
    for (const auto& v : convolve_T(bs, zero, targets)) CHECK(norm(v, 2) == 0.0);

    std::vector<double> gv(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) gv[k] = std::sin(7 * f.points[k][0]) * f.values[k];
    const auto g = f.with_values(gv);
    std::vector<double> sum(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) sum[k] = f.values[k] + gv[k];
    const auto tf = convolve_T(bs, f, targets), tg = convolve_T(bs, g, targets);
    const auto ts = convolve_T(bs, f.with_values(sum), targets);
    for (std::size_t k = 0; k < targets.size(); ++k)
        for (int d = 0; d < 2; ++d) CHECK(std::abs(ts[k][d] - tf[k][d] - tg[k][d]) <= 1e-12);
}

TEST_CASE("polar cell integral") {
    const auto gn = KernelSpec::builtin("grad-newtonian-2d");
    Mat3 cell{};
    at(cell, 0, 0) = at(cell, 1, 1) = 0.1;
    // Centred target: odd kernel, symmetric cell.
    const Point c0 = polar_cell_integral(gn, {0, 0, 0}, cell);
    CHECK(std::abs(c0[0]) < 1e-14);
    // Off-centre target: compare with a fine midpoint sum over the cell.
    const Point off{0.02, -0.01, 0};
    const Point pc = polar_cell_integral(gn, off, cell, 4096);
    const int m = 2000;
    double ax = 0, ay = 0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const Point xp{-0.05 + 0.1 * (a + 0.5) / m, -0.05 + 0.1 * (b + 0.5) / m, 0};
            const Point y = sub(off, xp);
            const double r2 = y[0] * y[0] + y[1] * y[1];
            if (r2 == 0.0) continue;
            ax += y[0] / (2 * kPi * r2) * (0.1 / m) * (0.1 / m);
            ay += y[1] / (2 * kPi * r2) * (0.1 / m) * (0.1 / m);
        }
    CHECK(pc[0] == doctest::Approx(ax).epsilon(1e-3));
    CHECK(pc[1] == doctest::Approx(ay).epsilon(1e-3));
}

TEST_CASE("polar correction at an off-node target") {
    const auto gn = KernelSpec::builtin("grad-newtonian-2d");
    const Point t{0.5 + 1.0 / 96, 0.01, 0};
    double err_ex = 0, err_pc = 0;
    for (int m : {32, 64}) {
        const auto f = disk_indicator(1.0 / m);
        const auto a = convolve_T(gn, f, {t}, SingularCellRule::exclude);
        const auto b = convolve_T(gn, f, {t}, SingularCellRule::polar_correct);
        err_ex = std::hypot(a[0][0] - t[0] / 2, a[0][1] - t[1] / 2);
        err_pc = std::hypot(b[0][0] - t[0] / 2, b[0][1] - t[1] / 2);
    }
    CHECK(err_pc < err_ex);
}

TEST_CASE("principal value of a constant on a ball vanishes at the centre") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    const double h = 1.0 / 32;
    const auto g = LatticeGeometry::centered(2, h, 40);
    const auto one = SampledField::on_lattice(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[1] < 1.2 ? 1.0 : 0.0; });
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto s = convolve_S_pv(bs, i, j, one, {{0, 0, 0}}, PVConfig::for_spacing(h));
            CHECK(std::abs(s.values[0]) < 1e-12);
        }
    const auto zero = one.with_values(std::vector<double>(one.size(), 0.0));
    CHECK(convolve_S_pv(bs, 0, 1, zero, {{0.3, 0.1, 0}}, PVConfig::for_spacing(h)).values[0] == 0.0);
}

TEST_CASE("PVConfig validation and refusal") {
    PVConfig c{0.01, 0.02, SingularCellRule::exclude};
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK_NOTHROW(PVConfig::for_spacing(0.1).validate());
    CHECK(parse_cell_rule("polar-correct") == SingularCellRule::polar_correct);
    CHECK_THROWS_AS(parse_cell_rule("nearest"), ConfigError);

    // A derivative kernel with nonzero spherical mean has no principal value.
    auto bad = KernelSpec::custom(
        "radial-even", 2,
        [](const Point& x) {
            const double r = std::hypot(x[0], x[1]);
            return Point{x[0] / (r * r), x[1] / (r * r), 0.0};
        },
        [](int, int, const Point& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            return 1.0 / r2;  // homogeneous of degree -2, positive mean
        });
    const auto f = gaussian_bump_field(2, 0.25, 1.0 / 16);
    CHECK_THROWS_WITH_AS(convolve_S_pv(bad, 0, 0, f, {{0, 0, 0}}, PVConfig::for_spacing(1.0 / 16)),
                         "p.v. undefined for this component (nonzero spherical mean)", DomainError);
}

TEST_CASE("finite difference of T equals c f + S (discrete distributional derivative)") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    const auto c = dirac_correction(bs, 256);
    const std::vector<Point> xs{{0.125, 0.0625, 0}, {-0.1875, 0.25, 0}, {0, 0, 0}, {0.3125, -0.125, 0}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            std::vector<double> errs;
            for (int m : {16, 32, 64}) {
                const double h = 1.0 / m;
                const auto f = gaussian_bump_field(2, 0.25, h);
                double err = 0.0;
                for (const auto& x : xs) {
                    Point e{0, 0, 0};
                    e[i] = h;
                    const auto t = convolve_T(bs, f, {{x[0] + e[0], x[1] + e[1], 0}, {x[0] - e[0], x[1] - e[1], 0}});
                    const double dt = (t[0][j] - t[1][j]) / (2 * h);
                    const auto s = convolve_S_pv(bs, i, j, f, {x}, PVConfig::for_spacing(h));
                    err = std::max(err, std::abs(dt - (c(i, j) * gauss(x, 0.25) + s.values[0])));
                }
                errs.push_back(err);
            }
            INFO("i=" << i << " j=" << j << " errors " << errs[0] << " " << errs[1] << " " << errs[2]);
            CHECK(errs[1] <= errs[0] / 1.4);
            CHECK(errs[2] <= errs[1] / 1.4);
            CHECK(errs[2] < 2e-3);
        }
}

TEST_CASE("SIO constants for a bump family") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    std::vector<NamedField> fam;
    for (double w : {1.0, 0.5, 0.25}) fam.push_back({"w" + std::to_string(w), gaussian_bump_field(2, w, 1.0 / 16)});
    const auto z = fam[0].field.with_values(std::vector<double>(fam[0].field.size(), 0.0));
    fam.push_back({"zero", z});
    const auto rep = estimate_sio_constants(bs, 0, 1, fam, 0.5, PVConfig::for_spacing(1.0 / 16));
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.rows[3].skipped);
    double lo = 1e300, hi = 0;
    for (int k = 0; k < 3; ++k) {
        lo = std::min(lo, rep.rows[k].implied_c_eps);
        hi = std::max(hi, rep.rows[k].implied_c_eps);
    }
    CHECK(hi <= 4 * lo);

    // Doubling the field doubles S exactly; the implied constants are unchanged.
    const auto& f = fam[2].field;
    std::vector<double> twice(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) twice[k] = 2 * f.values[k];
    const auto s1 = convolve_S_pv(bs, 0, 1, f, f.points, PVConfig::for_spacing(1.0 / 16));
    const auto s2 = convolve_S_pv(bs, 0, 1, f.with_values(twice), f.points, PVConfig::for_spacing(1.0 / 16));
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(s2.values[k] == 2 * s1.values[k]);
    const auto r2 = estimate_sio_constants(bs, 0, 1, {{"2f", f.with_values(twice)}}, 0.5, PVConfig::for_spacing(1.0 / 16));
    CHECK(r2.rows[0].implied_c_eps == rep.rows[2].implied_c_eps);
    CHECK(r2.rows[0].implied_c_sna == rep.rows[2].implied_c_sna);
}

TEST_CASE("epsilon sensitivity scales like eps^gamma |f|_gamma") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    std::vector<double> cs;
    for (int m : {16, 32}) {
        const double h = 1.0 / m;
        const auto f = gaussian_bump_field(2, 0.5, h);
        const auto s = convolve_S_pv(bs, 0, 1, f, f.points, PVConfig::for_spacing(h));
        cs.push_back(s.max_eps_sensitivity / (std::pow(2 * h, 0.5) * holder_seminorm(f, 0.5)));
    }
    // An upper bound: for smooth data the constant may only shrink under refinement.
    CHECK(cs[0] > 0.0);
    CHECK(cs[1] <= 2 * cs[0]);
}

TEST_CASE("worker count does not change sums") {
    const auto qg = KernelSpec::builtin("qg-3d");
    const auto f = gaussian_bump_field(3, 0.25, 1.0 / 8);
    const auto a = convolve_T(qg, f, f.points, SingularCellRule::exclude, 1);
    const auto b = convolve_T(qg, f, f.points, SingularCellRule::exclude, 4);
    CHECK(a == b);
    const auto s1 = convolve_S_pv(qg, 0, 1, f, f.points, PVConfig::for_spacing(1.0 / 8), 1);
    const auto s3 = convolve_S_pv(qg, 0, 1, f, f.points, PVConfig::for_spacing(1.0 / 8), 3);
    CHECK(s1.values == s3.values);
}
