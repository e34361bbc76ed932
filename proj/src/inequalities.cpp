#include <algorithm>
#include <map>
#include <random>

#include "nlt/function_spaces.hpp"
#include "nlt/random_fields.hpp"

namespace nlt {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double holder_norm(const SampledField& f, double gamma) { return sup_norm(f) + holder_seminorm(f, gamma); }

SampledField compose_on(const LatticeGeometry& g, const std::function<double(const Point&)>& f,
                        const std::function<Point(const Point&)>& map) {
    return SampledField::on_lattice(g, [&](const Point& a) { return f(map(a)); });
}

/// Discrete ||X||_{1,gamma} on the label lattice with analytic DX:
/// sup|X| + sup|DX_rc| + max_rc |DX_rc|_gamma.
double flow_norm(const RandomDiffeomorphism& X, const LatticeGeometry& g, double gamma) {
    const int n = g.dim;
    const auto labels = g.nodes();
    double sup_x = 0.0, sup_dx = 0.0;
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(n * n), std::vector<double>(labels.size()));
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const Point x = X(labels[k]);
        for (int d = 0; d < n; ++d) sup_x = std::max(sup_x, std::abs(x[d]));
        const Mat3 J = X.jacobian(labels[k]);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                comps[static_cast<std::size_t>(r * n + c)][k] = at(J, r, c);
                sup_dx = std::max(sup_dx, std::abs(at(J, r, c)));
            }
    }
    return sup_x + sup_dx + holder_seminorm_multi(n, labels, g, comps, gamma);
}

class Recorder {
public:
    void add(const std::string& name, bool constant_free, int trial, std::uint64_t seed, double lhs,
             double rhs, bool passed) {
        InequalityRecord r{name, trial, seed, lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0, passed};
        report.records.push_back(r);
        auto [it, fresh] = index_.try_emplace(name, report.summaries.size());
        if (fresh) {
            InequalitySummary s;
            s.name = name;
            s.constant_free = constant_free;
            s.worst_slack = rhs - lhs;
            report.summaries.push_back(s);
        }
        auto& s = report.summaries[it->second];
        ++s.checks;
        if (!passed) {
            ++s.failures;
            s.passed = false;
            report.passed = false;
        }
        if (r.ratio > s.max_ratio || s.checks == 1) {
            s.max_ratio = std::max(s.max_ratio, r.ratio);
            s.worst_seed = seed;
        }
        s.worst_slack = std::min(s.worst_slack, rhs - lhs);
    }

    InequalitySummary& summary(const std::string& name) { return report.summaries[index_.at(name)]; }

    InequalityReport report;

private:
    std::map<std::string, std::size_t> index_;
};

}  // namespace

InequalityReport verify_holder_inequalities(const HolderSuiteOptions& opts) {
    if (opts.trials < 0) throw DomainError("trials must be nonnegative");
    const double gamma = opts.gamma;
    const LatticeGeometry g = LatticeGeometry::centered(2, 1.0 / static_cast<double>(opts.half_width), opts.half_width);
    const int n = g.dim;
    const auto labels = g.nodes();
    Recorder rec;
    auto holds = [&](double lhs, double rhs) { return lhs <= rhs + opts.tolerance * std::max(1.0, std::abs(rhs)); };

    for (int trial = 0; trial < opts.trials; ++trial) {
        const std::uint64_t s = trial_seed(opts.seed, trial);
        std::mt19937_64 rng(s);
        RandomField f({n}, rng), gfield({n}, rng);
        std::uniform_real_distribution<double> strength(0.0, 0.5);
        RandomDiffeomorphism X(n, strength(rng), rng);

        const SampledField sf = SampledField::on_lattice(g, f);
        const SampledField sg = SampledField::on_lattice(g, gfield);
        std::vector<double> prod(sf.size());
        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = sf.values[k] * sg.values[k];
        const SampledField sfg = sf.with_values(prod);

        const double f_sup = sup_norm(sf), g_sup = sup_norm(sg);
        const double f_semi = holder_seminorm(sf, gamma), g_semi = holder_seminorm(sg, gamma);
        const double fg_semi = holder_seminorm(sfg, gamma);

        {
            const double rhs = f_sup * g_semi + f_semi * g_sup;
            rec.add("seminorm_product", true, trial, s, fg_semi, rhs, holds(fg_semi, rhs));
        }
        {
            const double lhs = sup_norm(sfg) + fg_semi;
            const double rhs = (f_sup + f_semi) * (g_sup + g_semi);
            rec.add("norm_product", true, trial, s, lhs, rhs, holds(lhs, rhs));
        }

        // f o X on the labels; f itself sampled on the image points X(alpha).
        const SampledField fX = compose_on(g, f, X);
        std::vector<Point> image(labels.size());
        for (std::size_t k = 0; k < labels.size(); ++k) image[k] = X(labels[k]);
        const SampledField f_on_image = SampledField::scattered(n, image, fX.values);
        const double L = X.jacobian_bound();
        const double fX_semi = holder_seminorm(fX, gamma);
        const double f_image_semi = holder_seminorm(f_on_image, gamma);
        {
            const double rhs = f_image_semi * std::pow(L, gamma);
            rec.add("seminorm_composition", true, trial, s, fX_semi, rhs, holds(fX_semi, rhs));
        }
        {
            const double lhs = sup_norm(fX) + fX_semi;
            const double rhs = (sup_norm(f_on_image) + f_image_semi) * (1.0 + std::pow(L, gamma));
            rec.add("norm_composition", true, trial, s, lhs, rhs, holds(lhs, rhs));
        }
        {
            const SampledField fXinv = compose_on(g, f, [&](const Point& a) { return X.inverse(a); });
            const double lhs = holder_norm(fXinv, gamma);
            const double xnorm = flow_norm(X, g, gamma);
            const double rhs = holder_norm(sf, gamma) * (1.0 + std::pow(xnorm, gamma * (2 * n - 1)));
            const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
            rec.add("inverse_composition", false, trial, s, lhs, rhs, ratio <= opts.ratio_bound);
        }
    }
    return rec.report;
}

InequalityReport verify_zygmund_inequalities(const ZygmundSuiteOptions& opts) {
    if (opts.trials < 0) throw DomainError("trials must be nonnegative");
    const int n = 2;
    const LatticeGeometry coarse = LatticeGeometry::centered(n, 1.0 / static_cast<double>(opts.half_width), opts.half_width);
    const LatticeGeometry fine = LatticeGeometry::centered(n, 0.5 / static_cast<double>(opts.half_width), 2 * opts.half_width);
    Recorder rec;
    std::map<std::string, double> refined_max;

    auto zyg_norm = [](const SampledField& f) { return sup_norm(f) + zygmund_seminorm(f); };

    for (int trial = 0; trial < opts.trials; ++trial) {
        const std::uint64_t s = trial_seed(opts.seed, trial);
        std::mt19937_64 rng(s);
        RandomField::Options fo;
        fo.dim = n;
        fo.cusp = true;
        RandomField f(fo, rng), gfield(fo, rng);
        std::uniform_real_distribution<double> strength(0.0, 0.5);
        RandomDiffeomorphism X(n, strength(rng), rng);

        for (const LatticeGeometry* g : {&coarse, &fine}) {
            const bool is_fine = g == &fine;
            const SampledField sf = SampledField::on_lattice(*g, f);
            const SampledField sg = SampledField::on_lattice(*g, gfield);
            std::vector<double> prod(sf.size());
            for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = sf.values[k] * sg.values[k];
            const SampledField sfg = sf.with_values(prod);

            const double alg_lhs = zyg_norm(sfg);
            const double alg_rhs = zyg_norm(sf) * zyg_norm(sg);

            const SampledField fX = compose_on(*g, f, X);
            const double comp_lhs = zygmund_seminorm(fX);
            const double comp_rhs = zygmund_seminorm(sf) * (1.0 + flow_norm(X, *g, opts.gamma));

            if (!is_fine) {
                rec.add("zygmund_product", false, trial, s, alg_lhs, alg_rhs,
                        alg_rhs > 0.0 && alg_lhs / alg_rhs <= opts.ratio_bound);
                rec.add("zygmund_composition", false, trial, s, comp_lhs, comp_rhs,
                        comp_rhs > 0.0 && comp_lhs / comp_rhs <= opts.ratio_bound);
            } else {
                auto bump = [&](const std::string& name, double lhs, double rhs) {
                    const double r = rhs > 0.0 ? lhs / rhs : 0.0;
                    refined_max[name] = std::max(refined_max[name], r);
                };
                bump("zygmund_product", alg_lhs, alg_rhs);
                bump("zygmund_composition", comp_lhs, comp_rhs);
            }
        }
    }
    for (auto& s : rec.report.summaries) {
        s.max_ratio_refined = refined_max[s.name];
        const bool bounded = s.max_ratio_refined <= opts.ratio_bound;
        const bool stable = s.max_ratio > 0.0 && s.max_ratio_refined <= opts.refinement_factor * s.max_ratio &&
                            s.max_ratio <= opts.refinement_factor * s.max_ratio_refined;
        if (!bounded || !stable) {
            s.passed = false;
            rec.report.passed = false;
        }
    }
    return rec.report;
}

}  // namespace nlt
