#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlt {

/// A point in R^n for n <= 3. Unused trailing coordinates are kept at zero.
using Point = std::array<double, 3>;

/// Row-major 3x3 matrix; for n = 2 only the leading 2x2 block is meaningful.
using Mat3 = std::array<double, 9>;

inline constexpr double kPi = 3.14159265358979323846;

inline double& at(Mat3& m, int r, int c) { return m[3 * r + c]; }
inline double at(const Mat3& m, int r, int c) { return m[3 * r + c]; }

inline Mat3 identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

inline double dot(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += a[d] * b[d];
    return s;
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point scaled(const Point& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline double det(const Mat3& m, int dim) {
    if (dim == 1) return m[0];
    if (dim == 2) return m[0] * m[4] - m[1] * m[3];
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 inverse(const Mat3& m, int dim);
Point apply(const Mat3& m, const Point& v, int dim);

// Error hierarchy. Each class carries the process exit code the CLI maps it to.

class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code) : std::runtime_error(what), code_(exit_code) {}
    int exit_code() const noexcept { return code_; }

private:
    int code_;
};

/// Violated precondition on an argument (bad exponent, too few points, r = 0, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what, 2) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

/// Numerical failure: lost admissibility, rejected Picard step, divergent quadrature.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what, 3) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what, 4) {}
};

inline constexpr const char* kVersion = "0.3.0";

}  // namespace nlt
