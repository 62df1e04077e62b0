#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace coe {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log C(n, k) via log-gamma; factorials overflow long before n reaches
// realistic sample sizes.
inline double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return neg_inf;
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Max-shifted log-sum-exp. Empty input has zero mass.
inline double log_sum_exp(std::span<const double> xs) {
  double m = neg_inf;
  for (double x : xs)
    if (x > m) m = x;
  if (std::isinf(m)) return neg_inf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace coe
