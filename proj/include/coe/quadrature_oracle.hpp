#pragma once

// Desk-scale verification oracle. Re-derives every likelihood factor by
// adaptive numerical quadrature of the defining flat-prior integrals
//   int_0^1 theta^s (1-theta)^f dtheta
// composed per group, with exact Pascal-triangle binomial coefficients.
// Deliberately shares no code with the closed-form path; intended for tests
// and kept to small groups by a hard cap.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coe/errors.hpp"
#include "coe/partition.hpp"

namespace coe::oracle {

inline constexpr std::int64_t default_group_cap = 64;

namespace detail {

// Exact up to n=64 in 64-bit-mantissa long double.
inline long double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0L;
  static thread_local std::vector<std::vector<long double>> table;
  if (std::size_t(n) >= table.size()) {
    for (std::size_t i = table.size(); i <= std::size_t(n); ++i) {
      std::vector<long double> row(i + 1, 1.0L);
      for (std::size_t j = 1; j < i; ++j) row[j] = table[i - 1][j - 1] + table[i - 1][j];
      table.push_back(std::move(row));
    }
  }
  return table[std::size_t(n)][std::size_t(k)];
}

inline double bernstein(double theta, std::int64_t s, std::int64_t f) {
  return std::pow(theta, double(s)) * std::pow(1.0 - theta, double(f));
}

inline double simpson(std::int64_t s, std::int64_t f, double a, double b, double fa, double fm,
                      double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(std::int64_t s, std::int64_t f, double a, double b, double fa, double fm,
                    double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = bernstein(lm, s, f), frm = bernstein(rm, s, f);
  const double left = simpson(s, f, a, m, fa, flm, fm);
  const double right = simpson(s, f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adapt(s, f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adapt(s, f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

// int_0^1 theta^s (1-theta)^f dtheta by adaptive Simpson.
inline double moment_integral(std::int64_t s, std::int64_t f) {
  if (s == 0 && f == 0) return 1.0;
  // Scale the tolerance by the peak of the integrand.
  const double total = double(s + f);
  const double peak = (s == 0 || f == 0)
                          ? 1.0
                          : std::exp(double(s) * std::log(double(s) / total) +
                                     double(f) * std::log(double(f) / total));
  const double fa = bernstein(0.0, s, f);
  const double fb = bernstein(1.0, s, f);
  const double fm = bernstein(0.5, s, f);
  const double whole = simpson(s, f, 0.0, 1.0, fa, fm, fb);
  return adapt(s, f, 0.0, 1.0, fa, fm, fb, whole, 1e-14 * peak, 48);
}

inline void check_cap(std::int64_t n, std::int64_t cap, const char* group) {
  if (n > cap)
    throw cap_error(std::string("oracle: group ") + group + " size " + std::to_string(n) +
                    " exceeds cap " + std::to_string(cap));
}

}  // namespace detail

// Joint of the comparable treated responses and the target's own response.
inline double factor_a11(std::int64_t n, std::int64_t x, int r_target,
                         std::int64_t cap = default_group_cap) {
  detail::check_cap(n, cap, "a11");
  const std::int64_t s = x + (r_target == 1 ? 1 : 0);
  const std::int64_t f = (n - x) + (r_target == 1 ? 0 : 1);
  return std::log(double(detail::binomial(n, x))) + std::log(detail::moment_integral(s, f));
}

inline double factor_exchangeable(std::int64_t n, std::int64_t x,
                                  std::int64_t cap = default_group_cap) {
  detail::check_cap(n, cap, "exchangeable");
  return std::log(double(detail::binomial(n, x))) + std::log(detail::moment_integral(x, n - x));
}

// Pooled untreated strata share one success parameter.
inline double factor_a0(std::int64_t n00, std::int64_t x00, std::int64_t n01, std::int64_t x01,
                        std::int64_t cap = default_group_cap) {
  detail::check_cap(n00, cap, "a00");
  detail::check_cap(n01, cap, "a01");
  return std::log(double(detail::binomial(n00, x00))) +
         std::log(double(detail::binomial(n01, x01))) +
         std::log(detail::moment_integral(x00 + x01, n00 + n01 - x00 - x01));
}

inline double oracle_marginal(const group_counts& g, int r_target,
                              std::int64_t cap = default_group_cap) {
  return factor_a11(g.a11.n, g.a11.x, r_target, cap) +
         factor_exchangeable(g.abar11.n, g.abar11.x, cap) +
         factor_a0(g.a00.n, g.a00.x, g.a01.n, g.a01.x, cap) +
         factor_exchangeable(g.abar0.n, g.abar0.x, cap);
}

}  // namespace coe::oracle
