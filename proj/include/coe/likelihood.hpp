#pragma once

#include <cmath>
#include <cstdint>

#include "coe/math.hpp"
#include "coe/partition.hpp"

namespace coe {

// Conjugate prior on every group-level success probability. The flat Beta(1,1)
// default is the reference analysis; the closed forms below hold for any
// (alpha, beta).
struct beta_prior {
  double alpha = 1.0;
  double beta = 1.0;
};

// log of the Beta-Binomial probability of x successes in n exchangeable
// trials: C(n,x) * B(alpha+x, beta+n-x) / B(alpha, beta).
// Under Beta(1,1) this collapses to 1/(n+1), independent of x.
inline double log_beta_binomial(std::int64_t n, std::int64_t x, beta_prior prior = {}) {
  return log_choose(n, x) +
         log_beta(prior.alpha + double(x), prior.beta + double(n - x)) -
         log_beta(prior.alpha, prior.beta);
}

// Comparable treated group, jointly with the target's own response. The group
// contributes its Beta-Binomial count probability; the target contributes the
// posterior-predictive factor (x+1)/(n+2) when she responded, (n-x+1)/(n+2)
// when she did not (flat-prior form).
inline double factor_a11(std::int64_t n, std::int64_t x, int r_target, beta_prior prior = {}) {
  const double denom = prior.alpha + prior.beta + double(n);
  const double predictive =
      r_target == 1 ? (prior.alpha + double(x)) / denom : (prior.beta + double(n - x)) / denom;
  return std::log(predictive) + log_beta_binomial(n, x, prior);
}

// Exchangeable remainder group: log 1/(n+1) under the flat prior, whatever x.
inline double factor_exchangeable(std::int64_t n, std::int64_t x, beta_prior prior = {}) {
  return log_beta_binomial(n, x, prior);
}

// Matched untreated records, both desire strata pooled under one success
// parameter. Equals the flat-prior Beta-Binomial of the pooled counts times
// the central hypergeometric probability of the observed split:
//   C(n00,x00) C(n01,x01) / C(n00+n01, x00+x01) * 1/(n00+n01+1).
// The split factor is the conditional Fisher exact-test term; it peaks when
// the two strata succeed at about the same rate.
inline double factor_a0(std::int64_t n00, std::int64_t x00, std::int64_t n01, std::int64_t x01,
                        beta_prior prior = {}) {
  return log_choose(n00, x00) + log_choose(n01, x01) +
         log_beta(prior.alpha + double(x00 + x01), prior.beta + double(n00 + n01 - x00 - x01)) -
         log_beta(prior.alpha, prior.beta);
}

struct log_marginal_parts {
  double a11 = 0;
  double abar11 = 0;
  double a0 = 0;
  double abar0 = 0;
  double log_value = 0;  // sum of the four factors
};

// Exact closed-form log marginal likelihood of the observed responses under
// one matching model, all group parameters independent with beta priors.
inline log_marginal_parts log_marginal(const group_counts& g, int r_target,
                                       beta_prior prior = {}) {
  log_marginal_parts parts;
  parts.a11 = factor_a11(g.a11.n, g.a11.x, r_target, prior);
  parts.abar11 = factor_exchangeable(g.abar11.n, g.abar11.x, prior);
  parts.a0 = factor_a0(g.a00.n, g.a00.x, g.a01.n, g.a01.x, prior);
  parts.abar0 = factor_exchangeable(g.abar0.n, g.abar0.x, prior);
  parts.log_value = parts.a11 + parts.abar11 + parts.a0 + parts.abar0;
  return parts;
}

}  // namespace coe
