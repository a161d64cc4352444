#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "cgnls/core.hpp"

namespace cgnls {

/// Relative L2 errors ||pred - exact||_2 / ||exact||_2 of the component
/// magnitudes |h1| and |h2| over aligned grids.
inline std::pair<double, double> relative_l2(std::span<const FieldSample> pred,
                                             std::span<const FieldSample> exact) {
  if (pred.size() != exact.size())
    throw UsageError("relative_l2: grids differ in size");
  if (pred.empty()) throw UsageError("relative_l2: empty grids");
  double num1 = 0.0, num2 = 0.0, den1 = 0.0, den2 = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto& p = pred[i];
    const auto& e = exact[i];
    if (p.point.x != e.point.x || p.point.t != e.point.t)
      throw UsageError("relative_l2: grids are not aligned at row " + std::to_string(i));
    const double mp1 = std::hypot(p.u1, p.v1), me1 = std::hypot(e.u1, e.v1);
    const double mp2 = std::hypot(p.u2, p.v2), me2 = std::hypot(e.u2, e.v2);
    num1 += (mp1 - me1) * (mp1 - me1);
    num2 += (mp2 - me2) * (mp2 - me2);
    den1 += me1 * me1;
    den2 += me2 * me2;
  }
  if (den1 == 0.0 || den2 == 0.0)
    throw UsageError("relative_l2: exact grid has zero norm");
  return {std::sqrt(num1 / den1), std::sqrt(num2 / den2)};
}

}  // namespace cgnls
