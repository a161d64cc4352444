#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgnls {

/// Space-time sample location: scaled distance x, retarded time t.
struct Point {
  double x = 0.0;
  double t = 0.0;
};

/// Rectangular computation domain [x_lo, x_hi] x [t_lo, t_hi].
struct Domain {
  double x_lo = -1.0;
  double x_hi = 1.0;
  double t_lo = -1.0;
  double t_hi = 1.0;

  void validate() const {
    if (!(x_lo < x_hi) || !(t_lo < t_hi))
      throw std::invalid_argument("Domain: require x_lo < x_hi and t_lo < t_hi");
  }
};

/// Uniform tensor grid over a domain. nx columns in x, nt rows in t.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double t_min = -1.0;
  double t_max = 1.0;
  int nx = 2;
  int nt = 2;

  void validate() const {
    if (!(x_min < x_max) || !(t_min < t_max))
      throw std::invalid_argument("GridSpec: degenerate bounds");
    if (nx < 2 || nt < 2)
      throw std::invalid_argument("GridSpec: nx and nt must be >= 2");
  }

  Domain domain() const { return Domain{x_min, x_max, t_min, t_max}; }
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dt() const { return (t_max - t_min) / (nt - 1); }
  long size() const { return static_cast<long>(nx) * nt; }
};

/// One dataset row: field values split into real/imaginary parts at a point.
struct FieldSample {
  Point point;
  double u1 = 0.0;
  double v1 = 0.0;
  double u2 = 0.0;
  double v2 = 0.0;
};

/// Invalid configuration (shapes, specs, config files).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller misuse of an operation (empty input, mismatched sizes).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values encountered during evaluation or optimization.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace cgnls
