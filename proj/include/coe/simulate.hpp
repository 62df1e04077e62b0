#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "coe/dataset.hpp"
#include "coe/errors.hpp"

namespace coe {

// One additive contribution: delta is added to the probability whenever
// covariate `covariate` (zero-based) sits at `level`.
struct level_effect {
  int covariate = 0;
  int level = 0;
  double delta = 0.0;
};

// P(E=1 | H) = base + sum of matching effect deltas.
struct desire_model {
  double base = 0.5;
  std::vector<level_effect> effects;
};

// P(R=1 | T, E, H) = base + T*treatment_effect + E*desire_effect + deltas.
struct response_model {
  double base = 0.5;
  double treatment_effect = 0.0;
  double desire_effect = 0.0;
  std::vector<level_effect> effects;
};

// Trial generator. Covariates are drawn uniformly over their levels and
// treatment is randomized independently of everything else; desire and
// response follow the additive models above.
struct generator_config {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<int> covariate_cardinalities;
  // Per-covariate level weights; empty = uniform over levels.
  std::vector<std::vector<double>> covariate_marginals;
  std::vector<std::string> covariate_names;  // optional; defaults to H1..Hk
  double assignment_ratio = 0.5;             // P(T=1)
  desire_model desire;
  response_model response;
  target_spec target;

  int num_covariates() const { return static_cast<int>(covariate_cardinalities.size()); }
};

namespace detail {

// Reachable [min, max] of the additive covariate contribution. Additivity
// makes the extremes separable per covariate, so no stratum enumeration is
// needed.
inline std::pair<double, double> effect_range(const std::vector<level_effect>& effects,
                                              const std::vector<int>& cardinalities) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t j = 0; j < cardinalities.size(); ++j) {
    std::vector<double> per_level(std::size_t(cardinalities[j]), 0.0);
    for (const auto& e : effects)
      if (e.covariate == int(j)) per_level[std::size_t(e.level)] += e.delta;
    lo += *std::min_element(per_level.begin(), per_level.end());
    hi += *std::max_element(per_level.begin(), per_level.end());
  }
  return {lo, hi};
}

inline void check_effects(const std::vector<level_effect>& effects,
                          const std::vector<int>& cardinalities, const std::string& model) {
  for (const auto& e : effects) {
    if (e.covariate < 0 || e.covariate >= int(cardinalities.size()))
      throw config_error(model + ": effect references covariate " +
                         std::to_string(e.covariate + 1) + " outside 1.." +
                         std::to_string(cardinalities.size()));
    if (e.level < 0 || e.level >= cardinalities[std::size_t(e.covariate)])
      throw config_error(model + ": effect level " + std::to_string(e.level) +
                         " outside cardinality of covariate " + std::to_string(e.covariate + 1));
  }
}

inline void check_probability_range(double base, double extra_lo, double extra_hi,
                                    const std::vector<level_effect>& effects,
                                    const std::vector<int>& cardinalities,
                                    const std::string& model) {
  const auto [lo, hi] = effect_range(effects, cardinalities);
  constexpr double slack = 1e-9;  // absorb decimal-literal rounding
  if (base + extra_lo + lo < -slack || base + extra_hi + hi > 1.0 + slack)
    throw config_error(model + ": reachable probability range [" +
                       std::to_string(base + extra_lo + lo) + ", " +
                       std::to_string(base + extra_hi + hi) + "] leaves [0,1]");
}

}  // namespace detail

inline void validate(const generator_config& cfg) {
  if (cfg.n < 0) throw config_error("generator: n must be nonnegative");
  const int k = cfg.num_covariates();
  if (k < 1) throw config_error("generator: need at least one covariate");
  if (k > max_covariates) throw config_error("generator: too many covariates (max 63)");
  for (int j = 0; j < k; ++j)
    if (cfg.covariate_cardinalities[std::size_t(j)] < 2)
      throw config_error("generator: cardinality of covariate " + std::to_string(j + 1) +
                         " must be >= 2");
  if (!cfg.covariate_names.empty() && int(cfg.covariate_names.size()) != k)
    throw config_error("generator: covariate_names length mismatch");
  if (!cfg.covariate_marginals.empty()) {
    if (int(cfg.covariate_marginals.size()) != k)
      throw config_error("generator: covariate_marginals length mismatch");
    for (int j = 0; j < k; ++j) {
      const auto& w = cfg.covariate_marginals[std::size_t(j)];
      if (int(w.size()) != cfg.covariate_cardinalities[std::size_t(j)])
        throw config_error("generator: marginals of covariate " + std::to_string(j + 1) +
                           " do not cover its levels");
      double sum = 0.0;
      for (double p : w) {
        if (p < 0.0 || p > 1.0)
          throw config_error("generator: marginal weight outside [0,1] for covariate " +
                             std::to_string(j + 1));
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw config_error("generator: marginals of covariate " + std::to_string(j + 1) +
                           " sum to " + std::to_string(sum) + ", expected 1");
    }
  }
  if (cfg.assignment_ratio < 0.0 || cfg.assignment_ratio > 1.0)
    throw config_error("generator: assignment_ratio outside [0,1]");

  detail::check_effects(cfg.desire.effects, cfg.covariate_cardinalities, "desire_model");
  detail::check_effects(cfg.response.effects, cfg.covariate_cardinalities, "response_model");
  detail::check_probability_range(cfg.desire.base, 0.0, 0.0, cfg.desire.effects,
                                  cfg.covariate_cardinalities, "desire_model");
  detail::check_probability_range(
      cfg.response.base,
      std::min(0.0, cfg.response.treatment_effect) + std::min(0.0, cfg.response.desire_effect),
      std::max(0.0, cfg.response.treatment_effect) + std::max(0.0, cfg.response.desire_effect),
      cfg.response.effects, cfg.covariate_cardinalities, "response_model");

  if (int(cfg.target.covariates.size()) != k)
    throw config_error("generator: target covariates length mismatch");
  for (int j = 0; j < k; ++j)
    if (cfg.target.covariates[std::size_t(j)] < 0 ||
        cfg.target.covariates[std::size_t(j)] >= cfg.covariate_cardinalities[std::size_t(j)])
      throw config_error("generator: target level outside cardinality of covariate " +
                         std::to_string(j + 1));
  if (cfg.target.desire != 0 && cfg.target.desire != 1)
    throw config_error("generator: target desire must be 0 or 1");
  if (cfg.target.response != 0 && cfg.target.response != 1)
    throw config_error("generator: target response must be 0 or 1");
}

inline double desire_probability(const generator_config& cfg, const std::vector<int>& h) {
  double p = cfg.desire.base;
  for (const auto& e : cfg.desire.effects)
    if (h[std::size_t(e.covariate)] == e.level) p += e.delta;
  return std::clamp(p, 0.0, 1.0);
}

inline double response_probability(const generator_config& cfg, int t, int e,
                                   const std::vector<int>& h) {
  double p = cfg.response.base + t * cfg.response.treatment_effect +
             e * cfg.response.desire_effect;
  for (const auto& eff : cfg.response.effects)
    if (h[std::size_t(eff.covariate)] == eff.level) p += eff.delta;
  return std::clamp(p, 0.0, 1.0);
}

// Deterministic draw: fixed engine, fixed bit-to-double recipe, fixed
// per-record order (covariates, then T, E, R). Standard distribution objects
// are avoided because their output is implementation-defined.
inline dataset simulate_trial(const generator_config& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };

  const int k = cfg.num_covariates();
  dataset data;
  data.schema.cardinalities = cfg.covariate_cardinalities;
  if (cfg.covariate_names.empty()) {
    for (int j = 0; j < k; ++j) data.schema.names.push_back("H" + std::to_string(j + 1));
  } else {
    data.schema.names = cfg.covariate_names;
  }
  data.target = cfg.target;

  data.records.reserve(std::size_t(cfg.n));
  for (std::int64_t i = 0; i < cfg.n; ++i) {
    trial_record rec;
    rec.id = std::to_string(i + 1);
    rec.covariates.reserve(std::size_t(k));
    for (int j = 0; j < k; ++j) {
      const int c = cfg.covariate_cardinalities[std::size_t(j)];
      if (cfg.covariate_marginals.empty()) {
        rec.covariates.push_back(std::min(int(uniform() * c), c - 1));
      } else {
        const auto& w = cfg.covariate_marginals[std::size_t(j)];
        const double u = uniform();
        double acc = 0.0;
        int level = c - 1;
        for (int l = 0; l < c; ++l) {
          acc += w[std::size_t(l)];
          if (u < acc) {
            level = l;
            break;
          }
        }
        rec.covariates.push_back(level);
      }
    }
    rec.treatment = uniform() < cfg.assignment_ratio ? 1 : 0;
    rec.desire = uniform() < desire_probability(cfg, rec.covariates) ? 1 : 0;
    rec.response =
        uniform() < response_probability(cfg, rec.treatment, rec.desire, rec.covariates) ? 1 : 0;
    data.records.push_back(std::move(rec));
  }

  data.validate();
  return data;
}

inline dataset simulate_trial(const generator_config& cfg) { return simulate_trial(cfg, cfg.seed); }

namespace detail {

inline std::vector<level_effect> parse_effects(const nlohmann::json& j, const std::string& model) {
  std::vector<level_effect> out;
  if (!j.contains("effects")) return out;
  if (!j["effects"].is_array()) throw config_error(model + ": effects must be an array");
  for (const auto& item : j["effects"]) {
    level_effect e;
    if (!item.contains("covariate") || !item.contains("level") || !item.contains("delta"))
      throw config_error(model + ": each effect needs covariate, level, delta");
    // External configs index covariates 1-based, mirroring the H1..Hk headers.
    e.covariate = item["covariate"].get<int>() - 1;
    e.level = item["level"].get<int>();
    e.delta = item["delta"].get<double>();
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

inline generator_config parse_generator_config(const nlohmann::json& j) {
  generator_config cfg;
  try {
    if (!j.contains("n")) throw config_error("generator config: missing field n");
    cfg.n = j["n"].get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (!j.contains("covariate_cardinalities"))
      throw config_error("generator config: missing field covariate_cardinalities");
    cfg.covariate_cardinalities = j["covariate_cardinalities"].get<std::vector<int>>();
    if (j.contains("covariate_marginals"))
      cfg.covariate_marginals = j["covariate_marginals"].get<std::vector<std::vector<double>>>();
    if (j.contains("covariate_names"))
      cfg.covariate_names = j["covariate_names"].get<std::vector<std::string>>();
    if (j.contains("assignment_ratio")) cfg.assignment_ratio = j["assignment_ratio"].get<double>();

    if (j.contains("desire_model")) {
      const auto& d = j["desire_model"];
      if (d.contains("base")) cfg.desire.base = d["base"].get<double>();
      cfg.desire.effects = detail::parse_effects(d, "desire_model");
    }
    if (j.contains("response_model")) {
      const auto& r = j["response_model"];
      if (r.contains("base")) cfg.response.base = r["base"].get<double>();
      if (r.contains("treatment_effect"))
        cfg.response.treatment_effect = r["treatment_effect"].get<double>();
      if (r.contains("desire_effect")) cfg.response.desire_effect = r["desire_effect"].get<double>();
      cfg.response.effects = detail::parse_effects(r, "response_model");
    }

    if (!j.contains("target")) throw config_error("generator config: missing field target");
    const auto& t = j["target"];
    if (!t.contains("covariates"))
      throw config_error("generator config: target needs covariates");
    cfg.target.covariates = t["covariates"].get<std::vector<int>>();
    if (t.contains("desire")) cfg.target.desire = t["desire"].get<int>();
    if (t.contains("response")) cfg.target.response = t["response"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("generator config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

inline generator_config load_generator_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path.string() + ": " + e.what());
  }
  return parse_generator_config(j);
}

}  // namespace coe
