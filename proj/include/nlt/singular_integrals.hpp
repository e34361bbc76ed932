#pragma once

#include <string>
#include <vector>

#include "nlt/function_spaces.hpp"
#include "nlt/kernels.hpp"
#include "nlt/sampled_field.hpp"

namespace nlt {

/// How the lattice cell containing the target enters a weakly singular sum.
/// `exclude` drops it (O(h) consistent since k is locally integrable);
/// `polar_correct` adds the exact cell integral of the homogeneous kernel,
/// computed in polar coordinates about the target.
enum class SingularCellRule { exclude, polar_correct };

SingularCellRule parse_cell_rule(const std::string& s);
std::string to_string(SingularCellRule r);

struct PVConfig {
    double epsilon = 0.0;  // excision radius; 0 selects 2h
    double h = 0.0;
    SingularCellRule singular_cell_rule = SingularCellRule::exclude;

    static PVConfig for_spacing(double h) { return {2.0 * h, h, SingularCellRule::exclude}; }
    /// DomainError unless h > 0 and epsilon >= h.
    void validate() const;
};

/// Integral of k(x - x') over the parallelepiped {c + M u : u in [-1/2, 1/2]^n}
/// with the target x = c + `offset`. Uses the polar form
///   int_S k(-theta) r_exit(theta) dtheta,
/// exact for the homogeneous kernel up to the angular quadrature.
Point polar_cell_integral(const KernelSpec& kernel, const Point& offset, const Mat3& cell,
                          int angular_order = 512);

/// T f(x) = sum_j k(x - x_j) f_j h^n over the lattice of f (midpoint rule),
/// with the cell containing x handled by `rule`.
std::vector<Point> convolve_T(const KernelSpec& kernel, const SampledField& f,
                              const std::vector<Point>& targets,
                              SingularCellRule rule = SingularCellRule::exclude, int workers = 1);

struct PVResult {
    std::vector<double> values;          // excision radius epsilon
    std::vector<double> values_2eps;     // excision radius 2 epsilon
    double max_eps_sensitivity = 0.0;    // max |S_eps - S_2eps|
};

/// S f(x) = p.v. sum of d_i k_j(x - x_j) f_j h^n over cells whose centre lies
/// outside B(x, epsilon). Refuses components whose spherical mean is not zero.
PVResult convolve_S_pv(const KernelSpec& kernel, int i, int j, const SampledField& f,
                       const std::vector<Point>& targets, const PVConfig& cfg, int workers = 1);

struct SIORow {
    std::string field_id;
    double epsilon = 0.0;
    double h = 0.0;
    double R = 0.0;
    double sup_f = 0.0;
    double seminorm_f = 0.0;
    double sup_S = 0.0;
    double seminorm_S = 0.0;
    double implied_c_eps = 0.0;  // ||Sf||_inf / (|f|_g eps^g + max(1, ln(R/eps)) ||f||_inf)
    double implied_c_sna = 0.0;  // |Sf|_g / |f|_g
    bool skipped = false;        // f == 0
};

struct SIOReport {
    std::string kernel;
    int i = 0;
    int j = 0;
    double gamma = 0.5;
    std::vector<SIORow> rows;
    double max_c_eps = 0.0;
    double max_c_sna = 0.0;
};

struct NamedField {
    std::string id;
    SampledField field;
};

/// Computes both sides of the sup-norm and seminorm bounds for every field in
/// the family (S f evaluated on the field's own lattice) and reports the implied
/// constants.
SIOReport estimate_sio_constants(const KernelSpec& kernel, int i, int j,
                                 const std::vector<NamedField>& family, double gamma,
                                 const PVConfig& cfg, int workers = 1,
                                 const PairOptions& pairs = {});

/// Truncated Gaussian bump exp(-|x|^2 / (2 w^2)) times a smooth cutoff on
/// [2.5 w, 3 w], sampled on a lattice of spacing h covering the support.
SampledField gaussian_bump_field(int dim, double width, double h);

}  // namespace nlt
