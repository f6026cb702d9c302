#pragma once

#include <cmath>
#include <numbers>

// Helpers for the circle R/Z with unit circumference.
namespace tospec {

/// Representative of x in [0, 1).
inline double wrap_unit(double x) noexcept {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

/// Signed shortest displacement from a to b, in [-1/2, 1/2).
inline double circle_offset(double a, double b) noexcept {
  double t = b - a;
  return t - std::round(t);
}

inline double circle_distance(double a, double b) noexcept {
  return std::abs(circle_offset(a, b));
}

/// sin(pi*s), exact zero at integers.
inline double sinpi(double s) noexcept {
  const double r = std::round(s);
  const double v = std::sin(std::numbers::pi * (s - r));
  return std::fmod(std::abs(r), 2.0) == 1.0 ? -v : v;
}

/// cos(pi*s), exact +-1 at integers.
inline double cospi(double s) noexcept {
  const double r = std::round(s);
  const double v = std::cos(std::numbers::pi * (s - r));
  return std::fmod(std::abs(r), 2.0) == 1.0 ? -v : v;
}

}  // namespace tospec
