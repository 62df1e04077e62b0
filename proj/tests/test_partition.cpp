#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "coe/errors.hpp"
#include "coe/partition.hpp"
#include "coe/simulate.hpp"

#include "support.hpp"

using Catch::Approx;

TEST_CASE("model_id round-trips indices and validates them", "[partition]") {
  const std::vector<int> idx = {0, 2, 5};
  const auto m = coe::model_id::from_indices(idx, 6);
  CHECK(m.mask == 0b100101u);
  CHECK(m.size() == 3);
  CHECK(m.indices() == idx);
  CHECK(m.contains(2));
  CHECK_FALSE(m.contains(1));
  CHECK_FALSE(m.empty());
  CHECK(coe::model_id{}.empty());

  const std::vector<int> dup = {1, 1};
  CHECK_THROWS_AS(coe::model_id::from_indices(dup, 4), coe::config_error);
  const std::vector<int> out_of_range = {4};
  CHECK_THROWS_AS(coe::model_id::from_indices(out_of_range, 4), coe::config_error);
  const std::vector<int> negative = {-1};
  CHECK_THROWS_AS(coe::model_id::from_indices(negative, 4), coe::config_error);
}

TEST_CASE("model_id subset and flip", "[partition]") {
  const auto a = coe::model_id::of_mask(0b0101);
  const auto b = coe::model_id::of_mask(0b1101);
  CHECK(a.subset_of(b));
  CHECK_FALSE(b.subset_of(a));
  CHECK(a.subset_of(a));
  CHECK(coe::model_id{}.subset_of(a));
  CHECK(a.with_flipped(1).mask == 0b0111u);
  CHECK(a.with_flipped(0).mask == 0b0100u);
}

TEST_CASE("lex order sorts by ascending index lists", "[partition]") {
  // k=2: {} < {0} < {0,1} < {1}, which mask order would get wrong.
  const auto e = coe::model_id::of_mask(0b00), h1 = coe::model_id::of_mask(0b01),
             both = coe::model_id::of_mask(0b11), h2 = coe::model_id::of_mask(0b10);
  CHECK(coe::lex_less(e, h1));
  CHECK(coe::lex_less(h1, both));
  CHECK(coe::lex_less(both, h2));
  CHECK_FALSE(coe::lex_less(h2, both));
  CHECK_FALSE(coe::lex_less(h1, h1));

  std::vector<coe::model_id> all;
  for (std::uint64_t m = 0; m < 8; ++m) all.push_back(coe::model_id::of_mask(m));
  std::sort(all.begin(), all.end(), coe::lex_less);
  const std::vector<std::uint64_t> expect = {0b000, 0b001, 0b011, 0b111,
                                             0b101, 0b010, 0b110, 0b100};
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].mask == expect[i]);
}

TEST_CASE("toy dataset group tallies are hand-checkable", "[partition]") {
  const auto data = support::toy_dataset();
  const coe::partition_index index(data);

  const auto empty = index.counts(coe::model_id{});
  CHECK(empty.a11 == coe::tally{2, 1});
  CHECK(empty.abar11 == coe::tally{1, 1});
  CHECK(empty.a01 == coe::tally{1, 1});
  CHECK(empty.a00 == coe::tally{2, 1});
  CHECK(empty.abar0 == coe::tally{0, 0});

  // Matching on either covariate separates record 5 into the far group.
  for (std::uint64_t mask : {0b01ull, 0b10ull, 0b11ull}) {
    const auto g = index.counts(coe::model_id::of_mask(mask));
    CHECK(g.a11 == coe::tally{2, 1});
    CHECK(g.abar11 == coe::tally{1, 1});
    CHECK(g.a01 == coe::tally{1, 1});
    CHECK(g.a00 == coe::tally{1, 0});
    CHECK(g.abar0 == coe::tally{1, 1});
  }
}

TEST_CASE("group sizes always add up to the sample size", "[partition]") {
  coe::generator_config cfg;
  cfg.n = 200;
  cfg.seed = 11;
  cfg.covariate_cardinalities = {2, 3, 2, 2};
  cfg.target.covariates = {1, 2, 0, 1};
  const auto data = coe::simulate_trial(cfg);
  const coe::partition_index index(data);
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const auto g = index.counts(coe::model_id::of_mask(mask));
    CHECK(g.a11.n + g.abar11.n + g.a01.n + g.a00.n + g.abar0.n == 200);
    for (const auto& t : {g.a11, g.abar11, g.a01, g.a00, g.abar0}) {
      CHECK(t.x >= 0);
      CHECK(t.x <= t.n);
    }
  }
}

TEST_CASE("coarser models only move records toward matched groups", "[partition]") {
  // Dropping a covariate can only grow the matched side of the partition.
  const auto data = support::toy_dataset();
  const coe::partition_index index(data);
  const auto full = index.counts(coe::model_id::of_mask(0b11));
  for (std::uint64_t sub : {0b00ull, 0b01ull, 0b10ull}) {
    const auto g = index.counts(coe::model_id::of_mask(sub));
    CHECK(g.abar0.n <= full.abar0.n);
    CHECK(g.a01.n + g.a00.n >= full.a01.n + full.a00.n);
  }
}

TEST_CASE("partition_counts rejects masks beyond the schema", "[partition]") {
  const auto data = support::toy_dataset();
  CHECK_THROWS_AS(coe::partition_counts(data, coe::model_id::of_mask(0b100)),
                  coe::config_error);
  CHECK_NOTHROW(coe::partition_counts(data, coe::model_id::of_mask(0b11)));
}

TEST_CASE("diagnostics report ratios only when defined", "[partition]") {
  const auto data = support::toy_dataset();

  const auto d_empty = coe::sufficiency_diagnostics(coe::partition_counts(data, coe::model_id{}));
  REQUIRE(d_empty.treated_ratio.has_value());
  CHECK(*d_empty.treated_ratio == Approx(0.5));
  REQUIRE(d_empty.untreated_e_ratio.has_value());
  CHECK(*d_empty.untreated_e_ratio == Approx((1.0 / 1.0) / (1.0 / 2.0)));

  // Under {H1} the a00 group has zero successes, so the ratio is absent.
  const auto d_h1 =
      coe::sufficiency_diagnostics(coe::partition_counts(data, coe::model_id::of_mask(0b01)));
  CHECK(d_h1.treated_ratio.has_value());
  CHECK_FALSE(d_h1.untreated_e_ratio.has_value());

  coe::group_counts none;
  const auto d_none = coe::sufficiency_diagnostics(none);
  CHECK_FALSE(d_none.treated_ratio.has_value());
  CHECK_FALSE(d_none.untreated_e_ratio.has_value());
}

TEST_CASE("index and stateless helper agree", "[partition]") {
  const auto data = support::toy_dataset();
  const coe::partition_index index(data);
  for (std::uint64_t mask = 0; mask < 4; ++mask)
    CHECK(index.counts(coe::model_id::of_mask(mask)) ==
          coe::partition_counts(data, coe::model_id::of_mask(mask)));
}
