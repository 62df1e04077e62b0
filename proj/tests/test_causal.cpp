#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "coe/causal.hpp"

using Catch::Approx;

TEST_CASE("posterior-mean risk ratio on a clean split", "[causal]") {
  coe::group_counts g;
  g.a11 = {8, 8};    // p_treated = 9/10
  g.a00 = {10, 4};   // pooled untreated: 18 records, 8 responses
  g.a01 = {8, 4};    // p_untreated = 9/20
  const auto est = coe::risk_ratio(g, coe::estimator_kind::posterior_mean);
  REQUIRE(est.p_treated.has_value());
  REQUIRE(est.p_untreated.has_value());
  REQUIRE(est.rr.has_value());
  REQUIRE(est.pc_lower.has_value());
  CHECK(*est.p_treated == Approx(0.9).margin(1e-15));
  CHECK(*est.p_untreated == Approx(0.45).margin(1e-15));
  CHECK(*est.rr == Approx(2.0).margin(1e-13));
  CHECK(*est.pc_lower == Approx(0.5).margin(1e-13));
  CHECK(est.kind == coe::estimator_kind::posterior_mean);
}

TEST_CASE("posterior-mean stays defined on empty groups", "[causal]") {
  const coe::group_counts g;  // nothing observed anywhere
  const auto est = coe::risk_ratio(g, coe::estimator_kind::posterior_mean);
  REQUIRE(est.p_treated.has_value());
  REQUIRE(est.p_untreated.has_value());
  CHECK(*est.p_treated == 0.5);
  CHECK(*est.p_untreated == 0.5);
  REQUIRE(est.rr.has_value());
  CHECK(*est.rr == Approx(1.0));
  CHECK(*est.pc_lower == 0.0);
}

TEST_CASE("mle estimates appear only when the data supports them", "[causal]") {
  coe::group_counts g;
  g.a11 = {10, 9};
  const auto t_only = coe::risk_ratio(g, coe::estimator_kind::mle);
  REQUIRE(t_only.p_treated.has_value());
  CHECK(*t_only.p_treated == Approx(0.9));
  CHECK_FALSE(t_only.p_untreated.has_value());
  CHECK_FALSE(t_only.rr.has_value());
  CHECK_FALSE(t_only.pc_lower.has_value());

  // Untreated responses all zero: probabilities exist, the ratio does not.
  g.a00 = {5, 0};
  const auto zero_denom = coe::risk_ratio(g, coe::estimator_kind::mle);
  REQUIRE(zero_denom.p_untreated.has_value());
  CHECK(*zero_denom.p_untreated == 0.0);
  CHECK_FALSE(zero_denom.rr.has_value());
  CHECK_FALSE(zero_denom.pc_lower.has_value());

  g.a01 = {5, 3};
  const auto full = coe::risk_ratio(g, coe::estimator_kind::mle);
  REQUIRE(full.rr.has_value());
  CHECK(*full.p_untreated == Approx(0.3));
  CHECK(*full.rr == Approx(3.0));
  CHECK(full.kind == coe::estimator_kind::mle);
}

TEST_CASE("the two estimators converge on large groups", "[causal]") {
  coe::group_counts g;
  g.a11 = {10000, 6000};
  g.a00 = {6000, 1800};
  g.a01 = {4000, 1200};
  const auto pm = coe::risk_ratio(g, coe::estimator_kind::posterior_mean);
  const auto ml = coe::risk_ratio(g, coe::estimator_kind::mle);
  REQUIRE(pm.rr.has_value());
  REQUIRE(ml.rr.has_value());
  CHECK(*ml.rr == Approx(2.0).margin(1e-12));
  CHECK(std::fabs(*pm.rr - *ml.rr) < 1e-3);
}

TEST_CASE("pooling is symmetric in the two untreated strata", "[causal]") {
  coe::group_counts a, b;
  a.a11 = b.a11 = {6, 4};
  a.a00 = {7, 2};
  a.a01 = {3, 1};
  b.a00 = {3, 1};
  b.a01 = {7, 2};
  for (auto kind : {coe::estimator_kind::posterior_mean, coe::estimator_kind::mle}) {
    const auto ea = coe::risk_ratio(a, kind);
    const auto eb = coe::risk_ratio(b, kind);
    REQUIRE(ea.rr.has_value());
    REQUIRE(eb.rr.has_value());
    CHECK(*ea.rr == Approx(*eb.rr).margin(1e-14));
  }
}

TEST_CASE("probability of causation lower bound", "[causal]") {
  CHECK(coe::pc_lower_bound(2.0) == Approx(0.5).margin(1e-15));
  CHECK(coe::pc_lower_bound(1.0) == 0.0);
  CHECK(coe::pc_lower_bound(0.5) == 0.0);
  CHECK(coe::pc_lower_bound(4.0) == Approx(0.75).margin(1e-15));

  // Monotone in the risk ratio and bounded by one.
  double prev = -1.0;
  for (int i = 1; i <= 1000; ++i) {
    const double rr = 1.0 + 99.0 * double(i) / 1000.0;
    const double pc = coe::pc_lower_bound(rr);
    CHECK(pc > prev);
    CHECK(pc < 1.0);
    prev = pc;
  }
}

TEST_CASE("excess risk ratio", "[causal]") {
  REQUIRE(coe::err(0.8, 0.4).has_value());
  CHECK(*coe::err(0.8, 0.4) == Approx(0.5).margin(1e-15));
  CHECK(*coe::err(0.5, 0.5) == 0.0);
  CHECK(*coe::err(0.6, 0.9) == Approx(-0.5).margin(1e-13));
  CHECK_FALSE(coe::err(0.0, 0.3).has_value());
  // err(p1, p0) = pc bound on the ratio p1/p0 whenever p1 >= p0 > 0.
  for (double p0 = 0.1; p0 < 0.9; p0 += 0.1)
    for (double p1 = p0; p1 <= 0.95; p1 += 0.05)
      CHECK(*coe::err(p1, p0) == Approx(coe::pc_lower_bound(p1 / p0)).margin(1e-12));
}

TEST_CASE("observational risk ratio form", "[causal]") {
  REQUIRE(coe::orr(0.8, 0.4).has_value());
  CHECK(*coe::orr(0.8, 0.4) == Approx(0.5).margin(1e-15));
  CHECK(*coe::orr(0.4, 0.8) == Approx(-1.0).margin(1e-15));
  CHECK(*coe::orr(0.4, 0.0) == Approx(1.0).margin(1e-15));
  CHECK_FALSE(coe::orr(0.0, 0.4).has_value());
}

TEST_CASE("two-source bound evaluates the printed form", "[causal]") {
  // Agreeing sources: the second term vanishes.
  const auto agree = coe::tian_pearl(0.8, 0.2, 0.3, 0.3, 0.5);
  REQUIRE(agree.has_value());
  CHECK(agree->raw == Approx((0.8 - 0.2) / 0.8).margin(1e-15));
  CHECK(agree->clamped == agree->raw);

  // Observational excess over the experimental arm adds mass.
  const auto gap = coe::tian_pearl(0.8, 0.2, 0.5, 0.3, 0.4);
  REQUIRE(gap.has_value());
  CHECK(gap->raw == Approx(0.75 + 0.2 / 0.4).margin(1e-13));
  CHECK(gap->clamped == 1.0);  // raw 1.25 clamps

  // A negative gap can push the raw value below zero; the clamp floors it.
  const auto low = coe::tian_pearl(0.5, 0.5, 0.1, 0.6, 0.2);
  REQUIRE(low.has_value());
  CHECK(low->raw == Approx(0.0 + (0.1 - 0.6) / 0.2).margin(1e-13));
  CHECK(low->clamped == 0.0);

  CHECK_FALSE(coe::tian_pearl(0.0, 0.2, 0.3, 0.3, 0.5).has_value());
  CHECK_FALSE(coe::tian_pearl(0.8, 0.2, 0.3, 0.3, 0.0).has_value());
}

TEST_CASE("two-source bound matches an independent rewrite", "[causal]") {
  // Same formula assembled separately, as a cross-check on the field order.
  auto rewrite = [](double pr1t1, double pr0t1, double pobs, double pexp, double pjoint) {
    return 1.0 - pr0t1 / pr1t1 + (pobs - pexp) / pjoint;
  };
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
    const auto got = coe::tian_pearl(a, b, c, d, e);
    REQUIRE(got.has_value());
    CHECK(got->raw == Approx(rewrite(a, b, c, d, e)).margin(1e-12));
    CHECK(got->clamped >= 0.0);
    CHECK(got->clamped <= 1.0);
  }
}
