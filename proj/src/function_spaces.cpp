#include "nlt/function_spaces.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "nlt/parallel.hpp"
#include "spatial_index.hpp"

namespace nlt {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("Holder exponent gamma must lie in the open interval (0, 1)");
}

double median_nn_distance(int dim, const std::vector<Point>& points) {
    if (points.size() < 2) return 0.0;
    detail::PointIndex index(dim, points);
    std::vector<double> d;
    d.reserve(points.size());
    for (const auto& p : points) {
        const auto nn = index.knn(p, 2);
        d.push_back(nn.size() > 1 ? nn[1].first : 0.0);
    }
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

inline double gamma_pow(double d, double gamma) { return std::pow(d, gamma); }

/// Calls visit(slot, i, j, d, d^gamma) for every evaluated pair i < j.
/// `slot` < slots() identifies the worker so callers can keep per-worker maxima.
class PairEnumerator {
public:
    PairEnumerator(int dim, std::span<const Point> points, const std::optional<LatticeGeometry>& lattice,
                   double gamma, const PairOptions& opts, int workers)
        : dim_(dim), points_(points), lattice_(lattice), gamma_(gamma), opts_(opts),
          workers_(std::max(1, workers)) {}

    int slots() const { return workers_; }

    /// Block index of a parallel_for chunk starting at `begin`.
    int slot_of(std::size_t begin, std::size_t n) const {
        const std::size_t w = static_cast<std::size_t>(workers_);
        if (w == 1 || n < 2 * w) return 0;
        return static_cast<int>(begin / ((n + w - 1) / w));
    }

    template <class Visit>
    void run(Visit&& visit) const {
        const std::size_t n = points_.size();
        if (n <= opts_.pair_budget) {
            parallel_for(n, workers_, [&](std::size_t b, std::size_t e) {
                const int slot = slot_of(b, n);
                for (std::size_t i = b; i < e; ++i)
                    for (std::size_t j = i + 1; j < n; ++j) {
                        const double d = norm(sub(points_[i], points_[j]), dim_);
                        if (d == 0.0) throw DomainError("sample points must be pairwise distinct");
                        visit(slot, i, j, d, gamma_pow(d, gamma_));
                    }
            });
            return;
        }
        const double spacing = lattice_ ? lattice_->h : median_spacing();
        const double r_near = opts_.near_factor * spacing;
        if (lattice_)
            lattice_near_pairs(r_near, visit);
        else
            scattered_near_pairs(r_near, visit);
        far_pairs(r_near, visit);
    }

private:
    double median_spacing() const {
        std::vector<Point> copy(points_.begin(), points_.end());
        return median_nn_distance(dim_, copy);
    }

    template <class Visit>
    void lattice_near_pairs(double r_near, Visit& visit) const {
        const LatticeGeometry& g = *lattice_;
        struct Offset {
            std::array<long, 3> o;
            double d, dg;
        };
        std::vector<Offset> offsets;
        const long reach = static_cast<long>(std::ceil(r_near / g.h));
        const long ry = dim_ >= 2 ? reach : 0, rz = dim_ >= 3 ? reach : 0;
        for (long a = -reach; a <= reach; ++a)
            for (long b = -ry; b <= ry; ++b)
                for (long c = -rz; c <= rz; ++c) {
                    const std::array<long, 3> o{a, b, c};
                    int first = 0;
                    while (first < 3 && o[first] == 0) ++first;
                    if (first == 3 || o[first] < 0) continue;
                    const double d = g.h * std::sqrt(static_cast<double>(a * a + b * b + c * c));
                    if (d >= r_near) continue;
                    offsets.push_back({o, d, gamma_pow(d, gamma_)});
                }
        const std::size_t n = g.size();
        parallel_for(n, workers_, [&](std::size_t b, std::size_t e) {
            const int slot = slot_of(b, n);
            for (std::size_t i = b; i < e; ++i) {
                const auto m = g.multi_index(i);
                for (const auto& off : offsets) {
                    const std::array<long, 3> q{m[0] + off.o[0], m[1] + off.o[1], m[2] + off.o[2]};
                    if (!g.contains(q)) continue;
                    visit(slot, i, g.flat_index(q), off.d, off.dg);
                }
            }
        });
    }

    template <class Visit>
    void scattered_near_pairs(double r_near, Visit& visit) const {
        std::vector<Point> copy(points_.begin(), points_.end());
        detail::PointIndex index(dim_, copy);
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < copy.size(); ++i) {
            index.within(copy[i], r_near, hits);
            for (std::size_t j : hits) {
                if (j <= i) continue;
                const double d = norm(sub(copy[i], copy[j]), dim_);
                if (d == 0.0) throw DomainError("sample points must be pairwise distinct");
                visit(0, i, j, d, gamma_pow(d, gamma_));
            }
            // nearest neighbour, when it lies beyond the near radius
            const auto nn = index.knn(copy[i], 2);
            if (nn.size() > 1 && nn[1].first >= r_near) {
                const std::size_t j = nn[1].second;
                visit(0, std::min(i, j), std::max(i, j), nn[1].first, gamma_pow(nn[1].first, gamma_));
            }
        }
    }

    template <class Visit>
    void far_pairs(double r_near, Visit& visit) const {
        const std::size_t n = points_.size();
        Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
        for (const auto& p : points_)
            for (int d = 0; d < dim_; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
        const double diameter = norm(sub(hi, lo), dim_);
        if (!(diameter > r_near)) return;
        const int bins = std::max(1, opts_.far_bins);
        std::vector<std::size_t> filled(bins, 0);
        const double log_span = std::log(diameter / r_near);
        std::mt19937_64 rng(opts_.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t quota = opts_.far_samples_per_bin;
        const std::size_t max_draws = quota * static_cast<std::size_t>(bins) * 4;
        std::size_t open_bins = bins;
        for (std::size_t draw = 0; draw < max_draws && open_bins > 0; ++draw) {
            std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            const double d = norm(sub(points_[i], points_[j]), dim_);
            if (d < r_near) continue;
            const int bin = std::min(bins - 1, static_cast<int>(std::log(d / r_near) / log_span * bins));
            if (filled[bin] >= quota) continue;
            if (++filled[bin] == quota) --open_bins;
            visit(0, i, j, d, gamma_pow(d, gamma_));
        }
    }

    int dim_;
    std::span<const Point> points_;
    const std::optional<LatticeGeometry>& lattice_;
    double gamma_;
    PairOptions opts_;
    int workers_;
};

/// Calls visit(ratio, |H|) for every symmetric lattice stencil.
template <class Visit>
void for_each_stencil(const SampledField& f, Visit&& visit) {
    if (!f.lattice) throw DomainError("zygmund seminorm needs a lattice field (unsupported structure: scattered)");
    const LatticeGeometry& g = *f.lattice;
    const auto dirs = stencil_directions(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.multi_index(i);
        const double center = f.values[i];
        for (const auto& d : dirs) {
            const double dnorm = std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
            for (long s = 1;; ++s) {
                const std::array<long, 3> p{m[0] + s * d[0], m[1] + s * d[1], m[2] + s * d[2]};
                const std::array<long, 3> q{m[0] - s * d[0], m[1] - s * d[1], m[2] - s * d[2]};
                if (!g.contains(p) || !g.contains(q)) break;
                const double H = static_cast<double>(s) * g.h * dnorm;
                const double second = f.values[g.flat_index(p)] - 2.0 * center + f.values[g.flat_index(q)];
                visit(std::abs(second) / H, H);
            }
        }
    }
}

}  // namespace

double sup_norm(const SampledField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double holder_seminorm_multi(int dim, std::span<const Point> points,
                             const std::optional<LatticeGeometry>& lattice,
                             std::span<const std::vector<double>> components, double gamma,
                             const PairOptions& opts) {
    check_gamma(gamma);
    if (points.size() < 2) throw DomainError("Holder seminorm needs at least two points");
    for (const auto& c : components)
        if (c.size() != points.size()) throw DomainError("component length does not match point count");
    PairEnumerator pairs(dim, points, lattice, gamma, opts, opts.workers);
    // per-worker maxima; max is exact and order-independent
    std::vector<double> best(static_cast<std::size_t>(pairs.slots()), 0.0);
    pairs.run([&](int slot, std::size_t i, std::size_t j, double, double dg) {
        double& b = best[static_cast<std::size_t>(slot)];
        for (const auto& c : components) {
            const double q = std::abs(c[i] - c[j]) / dg;
            if (q > b) b = q;
        }
    });
    return *std::max_element(best.begin(), best.end());
}

double holder_seminorm(const SampledField& f, double gamma, const PairOptions& opts) {
    f.validate();
    const std::vector<double>* comp = &f.values;
    return holder_seminorm_multi(f.dim, f.points, f.lattice, std::span<const std::vector<double>>(comp, 1),
                                 gamma, opts);
}

double zygmund_seminorm(const SampledField& f) {
    f.validate();
    double best = 0.0;
    for_each_stencil(f, [&](double ratio, double) { best = std::max(best, ratio); });
    return best;
}

std::vector<ModulusPoint> vanishing_modulus(const SampledField& f, double gamma,
                                            std::vector<double> h_levels, const PairOptions& opts) {
    f.validate();
    check_gamma(gamma);
    if (f.size() < 2) throw DomainError("Holder seminorm needs at least two points");
    std::vector<double> sorted = h_levels;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> bucket(sorted.size(), 0.0);
    PairEnumerator pairs(f.dim, f.points, f.lattice, gamma, opts, 1);
    pairs.run([&](int, std::size_t i, std::size_t j, double d, double dg) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), d);
        if (it == sorted.end()) return;
        const double q = std::abs(f.values[i] - f.values[j]) / dg;
        double& b = bucket[static_cast<std::size_t>(it - sorted.begin())];
        if (q > b) b = q;
    });
    for (std::size_t k = 1; k < bucket.size(); ++k) bucket[k] = std::max(bucket[k], bucket[k - 1]);
    std::vector<ModulusPoint> out;
    for (double h : h_levels) {
        const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), h) - sorted.begin());
        out.push_back({h, bucket[k]});
    }
    return out;
}

std::vector<ModulusPoint> zygmund_modulus(const SampledField& f, std::vector<double> delta_levels) {
    f.validate();
    std::vector<double> sorted = delta_levels;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> bucket(sorted.size(), 0.0);
    for_each_stencil(f, [&](double ratio, double H) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), H);
        if (it == sorted.end()) return;
        double& b = bucket[static_cast<std::size_t>(it - sorted.begin())];
        if (ratio > b) b = ratio;
    });
    for (std::size_t k = 1; k < bucket.size(); ++k) bucket[k] = std::max(bucket[k], bucket[k - 1]);
    std::vector<ModulusPoint> out;
    for (double h : delta_levels) {
        const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), h) - sorted.begin());
        out.push_back({h, bucket[k]});
    }
    return out;
}

double typical_spacing(const SampledField& f) {
    if (f.lattice) return f.lattice->h;
    return median_nn_distance(f.dim, f.points);
}

std::vector<double> dyadic_levels(double h0, int count) {
    std::vector<double> out;
    double h = h0;
    for (int k = 0; k < count; ++k, h *= 0.5) out.push_back(h);
    return out;
}

NormReport norm_report(const SampledField& f, double gamma, const std::vector<double>& h_levels,
                       const PairOptions& opts) {
    NormReport r;
    r.gamma = gamma;
    r.sup_norm = sup_norm(f);
    r.holder_seminorm = holder_seminorm(f, gamma, opts);
    r.vanishing_modulus = vanishing_modulus(f, gamma, h_levels, opts);
    r.spacing = typical_spacing(f);
    if (f.lattice) {
        r.zygmund_seminorm = zygmund_seminorm(f);
        r.zygmund_modulus = zygmund_modulus(f, h_levels);
    }
    return r;
}

}  // namespace nlt
