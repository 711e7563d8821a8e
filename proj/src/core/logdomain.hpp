#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

// All probability accounting in this project is carried in base-2 logarithms,
// so results read directly in bits. -inf encodes probability exactly 0.

namespace predlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline double safe_log2(double p) { return p > 0.0 ? std::log2(p) : kNegInf; }

inline double exp2_safe(double l) { return l == kNegInf ? 0.0 : std::exp2(l); }

// log2(2^a + 2^b) with max extraction.
inline double log2_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

// log2 of a sum of exponentials, max extraction against underflow.
inline double log2_sum(std::span<const double> ls) {
  double m = kNegInf;
  for (double l : ls) m = std::max(m, l);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double l : ls) acc += std::exp2(l - m);
  return m + std::log2(acc);
}

inline double log2_sum(const std::vector<double>& ls) {
  return log2_sum(std::span<const double>(ls));
}

}  // namespace predlab
