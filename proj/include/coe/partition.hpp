#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coe/dataset.hpp"
#include "coe/errors.hpp"

namespace coe {

// A covariate subset, the identity of one matching model. Bit j set means
// covariate j (0-based) takes part in the match.
struct model_id {
  std::uint64_t mask = 0;

  static model_id of_mask(std::uint64_t m) { return model_id{m}; }

  static model_id from_indices(std::span<const int> indices, int k) {
    model_id m;
    for (int j : indices) {
      if (j < 0 || j >= k)
        throw config_error("model index " + std::to_string(j) + " out of range for k=" +
                           std::to_string(k));
      if (m.contains(j))
        throw config_error("duplicate model index " + std::to_string(j));
      m.mask |= std::uint64_t(1) << j;
    }
    return m;
  }

  int size() const { return std::popcount(mask); }
  bool empty() const { return mask == 0; }
  bool contains(int j) const { return (mask >> j) & 1u; }
  bool subset_of(model_id other) const { return (mask & other.mask) == mask; }
  model_id with_flipped(int j) const { return model_id{mask ^ (std::uint64_t(1) << j)}; }

  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(std::size_t(size()));
    for (std::uint64_t m = mask; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  bool operator==(const model_id&) const = default;
};

// Lexicographic order on the ascending index list, so {} < {0} < {0,1} < {1}.
// Used as the canonical tie-break; plain mask order is not equivalent.
inline bool lex_less(model_id a, model_id b) {
  std::uint64_t x = a.mask, y = b.mask;
  while (x && y) {
    const int i = std::countr_zero(x), j = std::countr_zero(y);
    if (i != j) return i < j;
    x &= x - 1;
    y &= y - 1;
  }
  return x == 0 && y != 0;
}

struct tally {
  std::int64_t n = 0;  // group size
  std::int64_t x = 0;  // responses equal to 1

  bool operator==(const tally&) const = default;
};

// The five response groups a model carves out of the sample, relative to the
// target individual. Matching is exact equality on the model's covariates.
//   a11    treated, desire equal to the target's, covariates match
//   abar11 remaining treated
//   a01    untreated, E=1, covariates match
//   a00    untreated, E=0, covariates match
//   abar0  remaining untreated
struct group_counts {
  tally a11, abar11, a01, a00, abar0;

  bool operator==(const group_counts&) const = default;
};

// Per-record match masks against the target, built once so that repeated
// model evaluations over one dataset cost a single AND per record.
class partition_index {
 public:
  explicit partition_index(const dataset& data) : k_(data.num_covariates()) {
    rows_.reserve(data.records.size());
    for (const auto& rec : data.records) {
      row r;
      for (int j = 0; j < k_; ++j)
        if (rec.covariates[std::size_t(j)] == data.target.covariates[std::size_t(j)])
          r.match |= std::uint64_t(1) << j;
      r.treated = rec.treatment == 1;
      r.desire = rec.desire;
      r.desire_as_target = rec.desire == data.target.desire;
      r.response = rec.response == 1;
      rows_.push_back(r);
    }
  }

  int num_covariates() const { return k_; }

  group_counts counts(model_id model) const {
    group_counts g;
    const std::uint64_t need = model.mask;
    for (const row& r : rows_) {
      const bool match = (r.match & need) == need;
      tally* t;
      if (r.treated)
        t = (match && r.desire_as_target) ? &g.a11 : &g.abar11;
      else if (!match)
        t = &g.abar0;
      else
        t = r.desire ? &g.a01 : &g.a00;
      t->n += 1;
      t->x += r.response ? 1 : 0;
    }
    return g;
  }

 private:
  struct row {
    std::uint64_t match = 0;
    bool treated = false;
    bool desire = false;
    bool desire_as_target = false;
    bool response = false;
  };
  int k_;
  std::vector<row> rows_;
};

// Stateless variant; builds the index on the fly.
inline group_counts partition_counts(const dataset& data, model_id model) {
  if (model.mask >> data.num_covariates())
    throw config_error("model indices out of range for this dataset");
  return partition_index(data).counts(model);
}

// Empirical handles on the two conditions: the treated matched success ratio,
// and the ratio of untreated matched success ratios across E=1 / E=0. A ratio
// whose denominator vanishes is reported as absent, never as a sentinel.
struct diagnostics {
  std::optional<double> treated_ratio;
  std::optional<double> untreated_e_ratio;
};

inline diagnostics sufficiency_diagnostics(const group_counts& g) {
  diagnostics d;
  if (g.a11.n > 0) d.treated_ratio = double(g.a11.x) / double(g.a11.n);
  if (g.a01.n > 0 && g.a00.n > 0 && g.a00.x > 0) {
    const double r1 = double(g.a01.x) / double(g.a01.n);
    const double r0 = double(g.a00.x) / double(g.a00.n);
    d.untreated_e_ratio = r1 / r0;
  }
  return d;
}

}  // namespace coe
