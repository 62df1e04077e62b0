#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>

#include "coe/partition.hpp"

namespace coe {

// Lower bound on the probability of causation implied by the risk ratio:
// max{0, 1 - 1/rr}. Exceeding one half supports causation on the balance of
// probabilities.
inline double pc_lower_bound(double rr) {
  return std::max(0.0, 1.0 - 1.0 / rr);
}

enum class estimator_kind { posterior_mean, mle };

// Point estimates for the target's stratum. p_treated comes from the
// comparable treated group, p_untreated from the matched untreated records
// with both desire strata pooled. Quantities that cannot be formed from the
// data at hand are absent rather than NaN.
struct causal_estimates {
  std::optional<double> p_treated;
  std::optional<double> p_untreated;
  std::optional<double> rr;
  std::optional<double> pc_lower;
  estimator_kind kind = estimator_kind::posterior_mean;
};

inline causal_estimates risk_ratio(const group_counts& g, estimator_kind kind) {
  causal_estimates est;
  est.kind = kind;
  const std::int64_t n0 = g.a00.n + g.a01.n;
  const std::int64_t x0 = g.a00.x + g.a01.x;
  if (kind == estimator_kind::posterior_mean) {
    // Flat-prior posterior means are interior even on empty groups.
    est.p_treated = double(g.a11.x + 1) / double(g.a11.n + 2);
    est.p_untreated = double(x0 + 1) / double(n0 + 2);
  } else {
    if (g.a11.n > 0) est.p_treated = double(g.a11.x) / double(g.a11.n);
    if (n0 > 0) est.p_untreated = double(x0) / double(n0);
  }
  if (est.p_treated && est.p_untreated && *est.p_untreated > 0.0) {
    est.rr = *est.p_treated / *est.p_untreated;
    est.pc_lower = pc_lower_bound(*est.rr);
  }
  return est;
}

// Excess risk ratio (p1 - p0) / p1.
inline std::optional<double> err(double p1, double p0) {
  if (p1 == 0.0) return std::nullopt;
  return (p1 - p0) / p1;
}

// Observational risk ratio form 1 - 1/(p_t1/p_t0) = 1 - p_t0/p_t1.
inline std::optional<double> orr(double p_t1, double p_t0) {
  if (p_t1 == 0.0) return std::nullopt;
  return 1.0 - p_t0 / p_t1;
}

struct tian_pearl_result {
  double raw = 0.0;      // the two-term sum as printed
  double clamped = 0.0;  // raw forced into [0,1]
};

// Two-term bound mixing observational and experimental sources:
//   [P(R=1|T=1) - P(R=0|T=1)] / P(R=1|T=1)
// + [P_obs(R=1|T=0) - P_exp(R=1|T=0)] / P_obs(R=1, T=1).
// Evaluated literally in this form (the first-term numerator subtracts the
// complementary response probability); reports carry both the raw sum and
// the clamped value.
inline std::optional<tian_pearl_result> tian_pearl(double p_obs_r1_t1, double p_obs_r0_t1,
                                                   double p_obs_r1_t0, double p_exp_r1_t0,
                                                   double p_obs_r1_and_t1) {
  if (p_obs_r1_t1 == 0.0 || p_obs_r1_and_t1 == 0.0) return std::nullopt;
  const double first = (p_obs_r1_t1 - p_obs_r0_t1) / p_obs_r1_t1;
  const double second = (p_obs_r1_t0 - p_exp_r1_t0) / p_obs_r1_and_t1;
  tian_pearl_result out;
  out.raw = first + second;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

}  // namespace coe
