#include "nlt/singular_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlt/density.hpp"
#include "nlt/parallel.hpp"
#include "nlt/quadrature.hpp"
#include "summation.hpp"

namespace nlt {

SingularCellRule parse_cell_rule(const std::string& s) {
    if (s == "exclude") return SingularCellRule::exclude;
    if (s == "polar-correct" || s == "polar_correct") return SingularCellRule::polar_correct;
    throw ConfigError("singular_cell_rule must be exclude or polar-correct, got '" + s + "'");
}

std::string to_string(SingularCellRule r) {
    return r == SingularCellRule::exclude ? "exclude" : "polar-correct";
}

void PVConfig::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("PVConfig: h must be positive");
    if (!(epsilon >= h) || !std::isfinite(epsilon))
        throw DomainError("PVConfig: epsilon must be >= h (excision never finer than the grid)");
}

Point polar_cell_integral(const KernelSpec& kernel, const Point& offset, const Mat3& cell, int angular_order) {
    const int n = kernel.dim();
    const Mat3 minv = inverse(cell, n);
    const Point u0 = apply(minv, offset, n);
    for (int d = 0; d < n; ++d)
        if (std::abs(u0[d]) > 0.5) throw DomainError("polar_cell_integral: target outside the cell");
    const SphereRule rule = sphere_rule(n, angular_order);
    Point acc{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const Point& th = rule.nodes[q];
        const Point dir = apply(minv, th, n);
        double r_exit = std::numeric_limits<double>::infinity();
        for (int d = 0; d < n; ++d) {
            if (dir[d] > 0.0) r_exit = std::min(r_exit, (0.5 - u0[d]) / dir[d]);
            else if (dir[d] < 0.0) r_exit = std::min(r_exit, (-0.5 - u0[d]) / dir[d]);
        }
        const Point k = kernel.eval(scaled(th, -1.0));
        for (int d = 0; d < n; ++d) acc[d] += rule.weights[q] * k[d] * r_exit;
    }
    return acc;
}

namespace {

void require_lattice(const KernelSpec& kernel, const SampledField& f, const char* who) {
    if (!f.is_lattice()) throw DomainError(std::string(who) + ": field must be sampled on a lattice");
    if (f.dim != kernel.dim()) throw DomainError(std::string(who) + ": kernel and field dimensions differ");
    f.validate();
}

std::vector<double> cell_weights(const SampledField& f) {
    const double vol = f.lattice->cell_volume();
    std::vector<double> w(f.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = f.values[k] * vol;
    return w;
}

// Lattice cell containing p (nearest node), if it lies inside the lattice.
std::optional<std::size_t> containing_cell(const LatticeGeometry& g, const Point& p) {
    std::array<long, 3> m{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) m[d] = std::lround(p[d] / g.h) - g.lo[d];
    if (!g.contains(m)) return std::nullopt;
    return g.flat_index(m);
}

}  // namespace

std::vector<Point> convolve_T(const KernelSpec& kernel, const SampledField& f, const std::vector<Point>& targets,
                              SingularCellRule rule, int workers) {
    require_lattice(kernel, f, "convolve_T");
    const LatticeGeometry& g = *f.lattice;
    const int n = kernel.dim();
    const std::vector<double> w = cell_weights(f);
    const detail::SourceSet src(n, f.points, w);
    Mat3 cell{};
    for (int d = 0; d < n; ++d) at(cell, d, d) = g.h;
    std::vector<Point> out(targets.size(), Point{0.0, 0.0, 0.0});
    if (src.size() == 0) return out;
    parallel_for(targets.size(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const Point& x = targets[t];
            Point v = detail::kernel_sum(kernel, src, x);
            if (auto c = containing_cell(g, x); c && f.values[*c] != 0.0) {
                const Point y = sub(x, f.points[*c]);
                if (norm(y, n) > 0.0) {
                    const Point k = kernel.eval(y);
                    for (int d = 0; d < n; ++d) v[d] -= w[*c] * k[d];
                }
                if (rule == SingularCellRule::polar_correct) {
                    const Point cint = polar_cell_integral(kernel, y, cell);
                    for (int d = 0; d < n; ++d) v[d] += f.values[*c] * cint[d];
                }
            }
            out[t] = v;
        }
    });
    return out;
}

PVResult convolve_S_pv(const KernelSpec& kernel, int i, int j, const SampledField& f,
                       const std::vector<Point>& targets, const PVConfig& cfg_in, int workers) {
    require_lattice(kernel, f, "convolve_S_pv");
    const int n = kernel.dim();
    if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("convolve_S_pv: component index out of range");
    PVConfig cfg = cfg_in;
    if (cfg.h == 0.0) cfg.h = f.lattice->h;
    if (cfg.epsilon == 0.0) cfg.epsilon = 2.0 * cfg.h;
    cfg.validate();
    if (!check_spherical_mean_zero(kernel, i, j, n == 2 ? 256 : 64).passed)
        throw DomainError("p.v. undefined for this component (nonzero spherical mean)");

    const std::vector<double> w = cell_weights(f);
    const detail::SourceSet src(n, f.points, w);
    PVResult res;
    res.values.assign(targets.size(), 0.0);
    res.values_2eps.assign(targets.size(), 0.0);
    if (src.size() == 0) return res;
    const double eps = cfg.epsilon;
    const auto& map = kernel.newtonian_map();
    parallel_for(targets.size(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const Point& x = targets[t];
            if (map) {
                // d_i k_j(y) = M_ji / r^n - n (M y)_j y_i / r^(n+2)
                detail::PVMoments m1, m2;
                detail::newtonian_pv_moments(src, x, eps, m1, m2);
                auto combine = [&](const detail::PVMoments& m) {
                    double s = at(*map, j, i) * m.a0;
                    for (int l = 0; l < n; ++l) s -= n * at(*map, j, l) * m.b[l][i];
                    return s;
                };
                res.values[t] = combine(m1);
                res.values_2eps[t] = combine(m2);
            } else {
                double s1 = 0.0, s2 = 0.0;
                for (std::size_t q = 0; q < src.size(); ++q) {
                    const Point y{x[0] - src.x[q], x[1] - src.y[q], x[2] - src.z[q]};
                    const double r = norm(y, n);
                    if (!(r > eps)) continue;
                    const double v = src.w[q] * kernel.grad_pv(i, j, y);
                    s1 += v;
                    if (r > 2.0 * eps) s2 += v;
                }
                res.values[t] = s1;
                res.values_2eps[t] = s2;
            }
        }
    });
    for (std::size_t t = 0; t < targets.size(); ++t)
        res.max_eps_sensitivity = std::max(res.max_eps_sensitivity, std::abs(res.values[t] - res.values_2eps[t]));
    return res;
}

SIOReport estimate_sio_constants(const KernelSpec& kernel, int i, int j, const std::vector<NamedField>& family,
                                 double gamma, const PVConfig& cfg, int workers, const PairOptions& pairs) {
    if (family.empty()) throw DomainError("estimate_sio_constants: empty field family");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in the open interval (0, 1)");
    SIOReport rep;
    rep.kernel = kernel.name();
    rep.i = i;
    rep.j = j;
    rep.gamma = gamma;
    for (const auto& nf : family) {
        const SampledField& f = nf.field;
        PVConfig c = cfg;
        if (c.h == 0.0) c.h = f.lattice ? f.lattice->h : 0.0;
        if (c.epsilon == 0.0) c.epsilon = 2.0 * c.h;
        SIORow row;
        row.field_id = nf.id;
        row.epsilon = c.epsilon;
        row.h = c.h;
        row.R = f.support_radius();
        row.sup_f = sup_norm(f);
        if (row.sup_f == 0.0) {
            row.skipped = true;
            rep.rows.push_back(row);
            continue;
        }
        PairOptions po = pairs;
        po.workers = workers;
        row.seminorm_f = holder_seminorm(f, gamma, po);
        const PVResult s = convolve_S_pv(kernel, i, j, f, f.points, c, workers);
        const SampledField sf = f.with_values(s.values);
        row.sup_S = sup_norm(sf);
        row.seminorm_S = holder_seminorm(sf, gamma, po);
        const double bracket = row.seminorm_f * std::pow(c.epsilon, gamma) +
                               std::max(1.0, std::log(row.R / c.epsilon)) * row.sup_f;
        row.implied_c_eps = row.sup_S / bracket;
        row.implied_c_sna = row.seminorm_f > 0.0 ? row.seminorm_S / row.seminorm_f : 0.0;
        rep.max_c_eps = std::max(rep.max_c_eps, row.implied_c_eps);
        rep.max_c_sna = std::max(rep.max_c_sna, row.implied_c_sna);
        rep.rows.push_back(row);
    }
    return rep;
}

SampledField gaussian_bump_field(int dim, double width, double h) {
    if (!(width > 0.0) || !(h > 0.0)) throw DomainError("gaussian_bump_field: width and h must be positive");
    const double r_out = 3.0 * width;
    Point lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        lo[d] = -r_out;
        hi[d] = r_out;
    }
    const LatticeGeometry g = LatticeGeometry::covering(dim, h, lo, hi, 2);
    return SampledField::on_lattice(g, [&](const Point& x) {
        const double r = norm(x, dim);
        if (r >= r_out) return 0.0;
        return std::exp(-r * r / (2.0 * width * width)) * smooth_cutoff((r - 2.5 * width) / (0.5 * width));
    });
}

}  // namespace nlt
