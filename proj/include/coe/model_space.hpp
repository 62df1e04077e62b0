#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <thread>
#include <unordered_map>
#include <vector>

#include "coe/dataset.hpp"
#include "coe/errors.hpp"
#include "coe/likelihood.hpp"
#include "coe/math.hpp"
#include "coe/partition.hpp"

namespace coe {

enum class prior_kind { uniform, chen_chen };

struct model_prior {
  prior_kind kind = prior_kind::uniform;
  int k = 0;  // number of covariates
};

namespace detail {

// Exact for k <= 63.
inline std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * std::uint64_t(n - k + i) / std::uint64_t(i);
  return c;
}

}  // namespace detail

// Unnormalized prior mass of one model. The uniform prior spreads 2^-k over
// every subset. The size-layer prior gives each admissible size s the same
// total mass 1/(k+1), splits it evenly over the C(k,s) subsets of that size,
// and rules out models using more than half the covariates, so fewer
// covariates means a more probable model.
inline double prior_weight(model_id model, const model_prior& prior) {
  switch (prior.kind) {
    case prior_kind::uniform:
      return std::exp2(-double(prior.k));
    case prior_kind::chen_chen: {
      const int s = model.size();
      if (s > prior.k / 2) return 0.0;
      return 1.0 / (double(prior.k + 1) * double(detail::binomial_u64(prior.k, s)));
    }
  }
  return 0.0;
}

inline double log_prior(model_id model, const model_prior& prior) {
  const double w = prior_weight(model, prior);
  return w > 0.0 ? std::log(w) : neg_inf;
}

struct posterior_entry {
  model_id model;
  // Absent when the prior mass is zero and the likelihood was never evaluated.
  std::optional<double> log_marginal;
  double log_prior = neg_inf;
  double posterior = 0.0;
};

struct posterior_table {
  // Sorted by descending posterior; ties broken by lexicographic model order.
  std::vector<posterior_entry> entries;
  // log-sum-exp of log_marginal + log_prior over the enumerated support.
  double log_normalizer = neg_inf;
};

namespace detail {

inline void sort_canonical(posterior_table& table) {
  std::sort(table.entries.begin(), table.entries.end(),
            [](const posterior_entry& a, const posterior_entry& b) {
              if (a.posterior != b.posterior) return a.posterior > b.posterior;
              return lex_less(a.model, b.model);
            });
}

// Normalizes in place and applies the canonical order.
inline void finalize_table(posterior_table& table) {
  double max_w = neg_inf;
  for (const auto& e : table.entries)
    if (e.log_marginal && e.log_prior + *e.log_marginal > max_w)
      max_w = e.log_prior + *e.log_marginal;
  double sum = 0.0, comp = 0.0;  // Kahan
  for (auto& e : table.entries) {
    const double w =
        (e.log_marginal && !std::isinf(e.log_prior)) ? std::exp(e.log_prior + *e.log_marginal - max_w) : 0.0;
    e.posterior = w;
    const double y = w - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  for (auto& e : table.entries) e.posterior /= sum;
  table.log_normalizer = std::isinf(max_w) ? neg_inf : max_w + std::log(sum);
  sort_canonical(table);
}

}  // namespace detail

struct enumerate_options {
  int max_k = 20;      // exhaustive search is 2^k models
  int threads = 0;     // 0 = hardware concurrency
  beta_prior response_prior;
};

// Scores all 2^k models. Zero-prior models are kept in the table with
// posterior 0 but their likelihood is never computed.
inline posterior_table enumerate_posterior(const dataset& data, const model_prior& prior,
                                           enumerate_options options = {}) {
  const int k = data.num_covariates();
  if (k != prior.k) throw config_error("prior covariate count does not match dataset");
  if (k > options.max_k)
    throw cap_error("exhaustive enumeration over k=" + std::to_string(k) +
                    " exceeds the cap of " + std::to_string(options.max_k) +
                    "; use the MH sampler instead");

  const partition_index index(data);
  const std::uint64_t total = std::uint64_t(1) << k;
  posterior_table table;
  table.entries.resize(total);

  auto score_range = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      posterior_entry& e = table.entries[mask];
      e.model = model_id::of_mask(mask);
      e.log_prior = log_prior(e.model, prior);
      if (std::isinf(e.log_prior)) continue;
      const group_counts g = index.counts(e.model);
      e.log_marginal = log_marginal(g, data.target.response, options.response_prior).log_value;
    }
  };

  unsigned nthreads = options.threads > 0 ? unsigned(options.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  if (total < 4096) nthreads = 1;
  if (nthreads <= 1) {
    score_range(0, total);
  } else {
    std::vector<std::thread> workers;
    const std::uint64_t chunk = (total + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::uint64_t lo = t * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) workers.emplace_back(score_range, lo, hi);
    }
    for (auto& w : workers) w.join();
  }

  detail::finalize_table(table);
  return table;
}

struct mh_options {
  std::int64_t iterations = 10000;
  std::int64_t burn_in = -1;  // negative = 10% of iterations
  std::uint64_t seed = 0;
  int chains = 1;
  beta_prior response_prior;
};

// Random-walk chain over the model cube: propose flipping one uniformly
// chosen coordinate (a symmetric move, so the Hastings correction cancels)
// and accept with min{1, posterior ratio}. Returns empirical visit
// frequencies over the post-burn-in states of all chains merged.
inline posterior_table mh_sample(const dataset& data, const model_prior& prior,
                                 const mh_options& options) {
  const int k = data.num_covariates();
  if (k != prior.k) throw config_error("prior covariate count does not match dataset");
  const std::int64_t burn_in =
      options.burn_in >= 0 ? options.burn_in : options.iterations / 10;
  if (options.iterations <= burn_in)
    throw config_error("mh: iterations must exceed burn-in");
  if (options.chains < 1) throw config_error("mh: need at least one chain");

  const partition_index index(data);

  struct scored {
    double log_marginal;
    double log_prior;
    double log_target;
  };
  std::unordered_map<std::uint64_t, scored> cache;
  auto score = [&](model_id m) -> const scored& {
    auto it = cache.find(m.mask);
    if (it == cache.end()) {
      scored s;
      s.log_prior = log_prior(m, prior);
      s.log_marginal = std::isinf(s.log_prior)
                           ? neg_inf
                           : log_marginal(index.counts(m), data.target.response,
                                          options.response_prior)
                                 .log_value;
      s.log_target = s.log_prior + s.log_marginal;
      it = cache.emplace(m.mask, s).first;
    }
    return it->second;
  };

  std::unordered_map<std::uint64_t, std::int64_t> visits;
  std::int64_t total_visits = 0;

  for (int chain = 0; chain < options.chains; ++chain) {
    std::seed_seq seq{options.seed, std::uint64_t(chain)};
    std::mt19937_64 rng(seq);
    auto next_coordinate = [&] { return int(rng() % std::uint64_t(k)); };
    auto next_uniform = [&] { return double(rng() >> 11) * 0x1.0p-53; };

    model_id current;  // start from the unconditional model; positive prior either way
    double log_target = score(current).log_target;

    for (std::int64_t iter = 0; iter < options.iterations; ++iter) {
      const model_id proposal = current.with_flipped(next_coordinate());
      const double proposal_target = score(proposal).log_target;
      const double delta = proposal_target - log_target;
      if (delta >= 0.0 || next_uniform() < std::exp(delta)) {
        current = proposal;
        log_target = proposal_target;
      }
      assert(log_target == score(current).log_target);
      if (iter >= burn_in) {
        visits[current.mask] += 1;
        ++total_visits;
      }
    }
  }

  posterior_table table;
  table.entries.reserve(visits.size());
  std::vector<double> support_weights;
  for (const auto& [mask, count] : visits) {
    posterior_entry e;
    e.model = model_id::of_mask(mask);
    const scored& s = cache.at(mask);
    e.log_marginal = s.log_marginal;
    e.log_prior = s.log_prior;
    e.posterior = double(count) / double(total_visits);
    support_weights.push_back(s.log_target);
    table.entries.push_back(e);
  }
  table.log_normalizer = log_sum_exp(support_weights);
  detail::sort_canonical(table);
  return table;
}

inline std::vector<posterior_entry> top_models(const posterior_table& table, std::size_t m) {
  if (m < 1) throw config_error("top_models: m must be >= 1");
  const std::size_t take = std::min(m, table.entries.size());
  return {table.entries.begin(), table.entries.begin() + std::ptrdiff_t(take)};
}

}  // namespace coe
