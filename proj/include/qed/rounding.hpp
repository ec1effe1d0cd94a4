#pragma once

#include <cmath>

namespace qed {

/// Values within 1e-9 (relative) of an integer are treated as that integer,
/// so floating round-off in a staffing formula never adds or drops a server.
inline double snap_integer(double x) {
  const double r = std::round(x);
  return std::fabs(x - r) <= 1e-9 * std::fmax(1.0, std::fabs(x)) ? r : x;
}

inline long long ceil_snapped(double x) { return static_cast<long long>(std::ceil(snap_integer(x))); }

/// Nearest integer, ties rounded up.
inline long long round_half_up(double x) {
  return static_cast<long long>(std::floor(snap_integer(x) + 0.5));
}

/// Smallest integer strictly greater than x.
inline long long first_above(double x) { return static_cast<long long>(std::floor(x)) + 1; }

}  // namespace qed
