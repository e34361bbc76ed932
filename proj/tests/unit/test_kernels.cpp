#include <doctest.h>

#include <cmath>
#include <random>

#include "nlt/kernels.hpp"
#include "nlt/quadrature.hpp"

using namespace nlt;

namespace {

constexpr double tau = 2.0 * kPi;

// Hand-written references, independent of the library's matrix form.
Point bs_ref(const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return {-x[1] / (tau * r2), x[0] / (tau * r2), 0.0};
}

double newton2(double x, double y) { return std::log(std::hypot(x, y)) / tau; }

}  // namespace

TEST_CASE("built-in kernel values") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    const Point v = bs.eval({1.0, 0.0, 0.0});
    CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(1.0 / tau).epsilon(1e-14));

    // Cross-check against the perpendicular gradient of N by finite differences.
    const double h = 1e-6;
    const Point x{0.3, -0.7, 0.0};
    const double dNdx = (newton2(x[0] + h, x[1]) - newton2(x[0] - h, x[1])) / (2 * h);
    const double dNdy = (newton2(x[0], x[1] + h) - newton2(x[0], x[1] - h)) / (2 * h);
    const Point k = bs.eval(x);
    CHECK(k[0] == doctest::Approx(-dNdy).epsilon(1e-8));
    CHECK(k[1] == doctest::Approx(dNdx).epsilon(1e-8));

    const auto gn = KernelSpec::builtin("grad-newtonian-2d");
    const Point g = gn.eval({0.0, 3.0, 0.0});
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(1.0 / (6.0 * kPi)).epsilon(1e-14));

    const auto g3 = KernelSpec::builtin("grad-newtonian-3d");
    const Point g3v = g3.eval({0.0, 0.0, 2.0});
    CHECK(g3v[2] == doctest::Approx(1.0 / (4.0 * kPi * 4.0)).epsilon(1e-14));

    const auto qg = KernelSpec::builtin("qg-3d");
    const Point q = qg.eval({1.0, 0.0, 0.5});
    const double r3 = std::pow(1.25, 1.5);
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(1.0 / (4.0 * kPi * r3)).epsilon(1e-14));
    CHECK(q[2] == 0.0);
}

TEST_CASE("kernel sign flag flips the velocity") {
    const auto a = KernelSpec::builtin("grad-newtonian-2d", 1.0);
    const auto b = KernelSpec::builtin("grad-newtonian-2d", -1.0);
    const Point x{0.4, 0.1, 0.0};
    CHECK(a.eval(x)[0] == -b.eval(x)[0]);
    CHECK_THROWS_AS(KernelSpec::builtin("grad-newtonian-2d", 0.5), DomainError);
    CHECK_THROWS_AS(KernelSpec::builtin("no-such-kernel"), ConfigError);
}

TEST_CASE("singular at origin") {
    for (const auto& name : KernelSpec::builtin_names()) {
        const auto k = KernelSpec::builtin(name);
        CHECK_THROWS_WITH_AS(k.eval({0, 0, 0}), "kernel singular at origin", DomainError);
        CHECK_THROWS_AS(k.grad_pv(0, 0, {0, 0, 0}), DomainError);
    }
}

TEST_CASE("homogeneity of k and its derivative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lam(0.1, 10.0);
    for (const auto& name : KernelSpec::builtin_names()) {
        const auto k = KernelSpec::builtin(name);
        const int n = k.dim();
        for (int s = 0; s < 100; ++s) {
            Point x{u(rng), u(rng), n == 3 ? u(rng) : 0.0};
            const double l = lam(rng);
            const Point kx = k.eval(x), klx = k.eval(scaled(x, l));
            const double scale = std::pow(l, -(n - 1));
            for (int d = 0; d < n; ++d) CHECK(std::abs(klx[d] - scale * kx[d]) <= 1e-12 * norm(kx, n));
        }
        CHECK(k.grad_pv(0, 1, {2.0, 2.0, n == 3 ? 2.0 : 0.0}) ==
              doctest::Approx(k.grad_pv(0, 1, {1.0, 1.0, n == 3 ? 1.0 : 0.0}) / std::pow(2.0, n)).epsilon(1e-14));
    }
}

TEST_CASE("derivative kernel closed forms") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    // d_1 k_2 with k_2 = x1 / (2 pi |x|^2): (x2^2 - x1^2) / (2 pi |x|^4) at (1, 0)
    CHECK(bs.grad_pv(0, 1, {1.0, 0.0, 0.0}) == doctest::Approx(-1.0 / tau).epsilon(1e-14));

    // Harmonicity of N off the origin, using finite differences of N itself as the oracle.
    const auto gn = KernelSpec::builtin("grad-newtonian-2d");
    const Point x{0.6, -0.8, 0.0};
    CHECK(std::abs(gn.grad_pv(0, 0, x) + gn.grad_pv(1, 1, x)) < 1e-14);
    const double h = 1e-4;
    const double lap = (newton2(x[0] + h, x[1]) + newton2(x[0] - h, x[1]) + newton2(x[0], x[1] + h) +
                        newton2(x[0], x[1] - h) - 4.0 * newton2(x[0], x[1])) /
                       (h * h);
    CHECK(std::abs(lap) < 1e-6);
}

TEST_CASE("validate_kernel meets the residual thresholds") {
    for (const auto& name : KernelSpec::builtin_names()) {
        const auto rep = validate_kernel(KernelSpec::builtin(name), 256, 0, 100);
        INFO(name);
        CHECK(rep.homogeneity_residual <= 1e-12);
        CHECK(rep.grad_homogeneity_residual <= 1e-12);
        CHECK(rep.grad_fd_residual <= 1e-6);
        for (const auto& row : rep.spherical_mean_residuals)
            for (double m : row) CHECK(m <= 1e-8);
        CHECK(rep.passed);
    }
}

TEST_CASE("Dirac correction against brute-force circle quadrature") {
    // Oracle: plain trapezoid over 4096 equispaced angles with the explicit formula.
    auto oracle = [](auto kfun) {
        double c[2][2] = {};
        const int m = 4096;
        for (int q = 0; q < m; ++q) {
            const double th = tau * q / m;
            const Point s{std::cos(th), std::sin(th), 0.0};
            const Point k = kfun(s);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) c[i][j] += k[j] * s[i] * tau / m;
        }
        return std::array<double, 4>{c[0][0], c[0][1], c[1][0], c[1][1]};
    };
    const auto bs = dirac_correction(KernelSpec::builtin("biot-savart-2d"), 256);
    const auto obs = oracle(bs_ref);
    CHECK(std::abs(bs(0, 0) - obs[0]) < 1e-8);
    CHECK(std::abs(bs(0, 1) - obs[1]) < 1e-8);
    CHECK(std::abs(bs(1, 0) - obs[2]) < 1e-8);
    CHECK(std::abs(bs(1, 1) - obs[3]) < 1e-8);
    CHECK(bs(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bs(1, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::abs(bs.trace()) < 1e-12);

    const auto gn = dirac_correction(KernelSpec::builtin("grad-newtonian-2d"), 256);
    const auto ogn = oracle([](const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return Point{x[0] / (tau * r2), x[1] / (tau * r2), 0.0};
    });
    CHECK(std::abs(gn(0, 0) - ogn[0]) < 1e-8);
    CHECK(std::abs(gn(1, 1) - ogn[3]) < 1e-8);
    CHECK(gn(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(gn(0, 1)) < 1e-12);
    CHECK(gn.trace() == doctest::Approx(1.0).epsilon(1e-12));

    const auto g3 = dirac_correction(KernelSpec::builtin("grad-newtonian-3d"), 64);
    CHECK(g3.trace() == doctest::Approx(1.0).epsilon(1e-10));
    const auto qg = dirac_correction(KernelSpec::builtin("qg-3d"), 64);
    CHECK(std::abs(qg.trace()) < 1e-10);

    // Stability between orders 256 and 512.
    const auto bs512 = dirac_correction(KernelSpec::builtin("biot-savart-2d"), 512);
    for (int k = 0; k < 9; ++k) CHECK(std::abs(bs512.c[k] - bs.c[k]) <= 1e-8);
}

TEST_CASE("dirac_correction rejects tiny orders") {
    CHECK_THROWS_AS(dirac_correction(KernelSpec::builtin("biot-savart-2d"), 2), DomainError);
}

TEST_CASE("spherical means of derivative kernels vanish") {
    const auto bs = KernelSpec::builtin("biot-savart-2d");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(check_spherical_mean_zero(bs, i, j, 64, 1e-10).passed);
    const auto qg = KernelSpec::builtin("qg-3d");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(check_spherical_mean_zero(qg, i, j, 64, 1e-8).passed);
}

TEST_CASE("custom kernels are checked for homogeneity") {
    auto good = KernelSpec::custom(
        "scaled-bs", 2,
        [](const Point& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            return Point{-2 * x[1] / r2, 2 * x[0] / r2, 0.0};
        },
        [](int i, int j, const Point& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            const double a[2][2] = {{0, -2}, {2, 0}};  // k_j = a_jm x_m / r^2
            const double ax = a[j][0] * x[0] + a[j][1] * x[1];
            return a[j][i] / r2 - 2.0 * ax * x[i] / (r2 * r2);
        },
        Parity::odd);
    CHECK(good.eval({1, 0, 0})[1] == doctest::Approx(2.0));
    CHECK(dirac_correction(good, 256)(0, 1) == doctest::Approx(2.0 * kPi).epsilon(1e-10));

    auto bad = [] {
        return KernelSpec::custom(
            "wrong-degree", 2, [](const Point& x) { return Point{x[0], x[1], 0.0}; },
            [](int i, int j, const Point&) { return i == j ? 1.0 : 0.0; });
    };
    CHECK_THROWS_AS(bad(), DomainError);
}

TEST_CASE("sphere rules integrate low-order polynomials") {
    const auto r2 = sphere_rule(2, 32);
    double area = 0, m2 = 0;
    for (std::size_t q = 0; q < r2.weights.size(); ++q) {
        area += r2.weights[q];
        m2 += r2.weights[q] * r2.nodes[q][0] * r2.nodes[q][0];
    }
    CHECK(area == doctest::Approx(tau).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(kPi).epsilon(1e-14));
    const auto r3 = sphere_rule(3, 16);
    area = m2 = 0;
    for (std::size_t q = 0; q < r3.weights.size(); ++q) {
        area += r3.weights[q];
        m2 += r3.weights[q] * r3.nodes[q][2] * r3.nodes[q][2];
    }
    CHECK(area == doctest::Approx(4 * kPi).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
}
