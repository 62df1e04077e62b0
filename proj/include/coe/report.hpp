#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coe/causal.hpp"
#include "coe/dataset.hpp"
#include "coe/errors.hpp"
#include "coe/likelihood.hpp"
#include "coe/model_space.hpp"
#include "coe/partition.hpp"

namespace coe {

enum class search_kind { enumerate, mh };

// Echo of the knobs that shaped an analysis, carried into the report so a
// reader can rerun it.
struct analysis_settings {
  prior_kind prior = prior_kind::uniform;
  search_kind search = search_kind::enumerate;
  estimator_kind estimator = estimator_kind::posterior_mean;
  int top_m = 10;
  std::optional<std::int64_t> iterations;  // mh only
  std::optional<std::int64_t> burn_in;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
};

struct model_row {
  model_id model;
  std::vector<std::string> covariate_names;  // included covariates, in index order
  double posterior = 0.0;
  std::optional<double> log_marginal;
  double log_prior = 0.0;
  causal_estimates causal;
  diagnostics diag;
  group_counts groups;
};

struct analysis_report {
  std::int64_t n = 0;
  int k = 0;
  std::vector<std::string> covariate_names;  // full schema, in column order
  target_spec target;
  analysis_settings settings;
  std::size_t support_size = 0;  // rows in the full posterior table
  double log_normalizer = 0.0;
  std::vector<model_row> rows;  // top_m, posterior-sorted
};

inline std::vector<std::string> included_names(const covariate_schema& schema,
                                               const model_id& model) {
  std::vector<std::string> out;
  for (int j : model.indices()) out.push_back(schema.names[std::size_t(j)]);
  return out;
}

inline analysis_report build_report(const dataset& data, const posterior_table& table,
                                    const analysis_settings& settings) {
  analysis_report rep;
  rep.n = std::int64_t(data.records.size());
  rep.k = data.num_covariates();
  rep.covariate_names = data.schema.names;
  rep.target = data.target;
  rep.settings = settings;
  rep.support_size = table.entries.size();
  rep.log_normalizer = table.log_normalizer;

  const partition_index index(data);
  if (settings.top_m < 1) throw config_error("report: top must be >= 1");
  for (const auto& entry : top_models(table, std::size_t(settings.top_m))) {
    model_row row;
    row.model = entry.model;
    row.covariate_names = included_names(data.schema, entry.model);
    row.posterior = entry.posterior;
    row.log_marginal = entry.log_marginal;
    row.log_prior = entry.log_prior;
    row.groups = index.counts(entry.model);
    row.causal = risk_ratio(row.groups, settings.estimator);
    row.diag = sufficiency_diagnostics(row.groups);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

namespace detail {

inline nlohmann::ordered_json json_opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

inline nlohmann::ordered_json json_finite(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

// External model spelling is 1-based, matching the H1..Hk column headers.
inline nlohmann::ordered_json json_model_indices(const model_id& model) {
  auto arr = nlohmann::ordered_json::array();
  for (int j : model.indices()) arr.push_back(j + 1);
  return arr;
}

inline nlohmann::ordered_json json_tally(const tally& t) {
  return {{"n", t.n}, {"x", t.x}};
}

}  // namespace detail

inline const char* to_string(prior_kind k) {
  return k == prior_kind::uniform ? "uniform" : "chen-chen";
}

inline const char* to_string(search_kind k) {
  return k == search_kind::enumerate ? "enumerate" : "mh";
}

inline const char* to_string(estimator_kind k) {
  return k == estimator_kind::posterior_mean ? "posterior-mean" : "mle";
}

// Absent and non-finite numeric fields (an unscored model, a log prior of
// zero mass) serialize as null throughout.
inline nlohmann::ordered_json to_json(const analysis_report& rep) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;

  j["dataset"] = {{"n", rep.n},
                  {"k", rep.k},
                  {"covariates", rep.covariate_names},
                  {"target",
                   {{"covariates", rep.target.covariates},
                    {"desire", rep.target.desire},
                    {"response", rep.target.response}}}};

  nlohmann::ordered_json cfg;
  cfg["prior"] = to_string(rep.settings.prior);
  cfg["search"] = to_string(rep.settings.search);
  cfg["estimator"] = to_string(rep.settings.estimator);
  cfg["top"] = rep.settings.top_m;
  cfg["support_size"] = rep.support_size;
  cfg["log_normalizer"] = detail::json_finite(rep.log_normalizer);
  cfg["iterations"] = rep.settings.iterations ? nlohmann::ordered_json(*rep.settings.iterations)
                                              : nlohmann::ordered_json(nullptr);
  cfg["burn_in"] = rep.settings.burn_in ? nlohmann::ordered_json(*rep.settings.burn_in)
                                        : nlohmann::ordered_json(nullptr);
  cfg["seed"] = rep.settings.seed ? nlohmann::ordered_json(*rep.settings.seed)
                                  : nlohmann::ordered_json(nullptr);
  cfg["chains"] = rep.settings.chains ? nlohmann::ordered_json(*rep.settings.chains)
                                      : nlohmann::ordered_json(nullptr);
  j["analysis"] = cfg;

  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows) {
    nlohmann::ordered_json r;
    r["model"] = detail::json_model_indices(row.model);
    r["covariates"] = row.covariate_names;
    r["posterior"] = row.posterior;
    r["log_marginal"] = detail::json_opt(row.log_marginal);
    r["log_prior"] = detail::json_finite(row.log_prior);
    r["p_treated"] = detail::json_opt(row.causal.p_treated);
    r["p_untreated"] = detail::json_opt(row.causal.p_untreated);
    r["rr"] = detail::json_opt(row.causal.rr);
    r["pc_lower"] = detail::json_opt(row.causal.pc_lower);
    r["diagnostics"] = {{"treated_ratio", detail::json_opt(row.diag.treated_ratio)},
                        {"untreated_e_ratio", detail::json_opt(row.diag.untreated_e_ratio)}};
    rows.push_back(std::move(r));
  }
  j["models"] = rows;

  if (!rep.rows.empty()) {
    const auto& best = rep.rows.front();
    j["best_model"] = {{"model", detail::json_model_indices(best.model)},
                       {"selected", best.covariate_names},
                       {"posterior", best.posterior},
                       {"rr", detail::json_opt(best.causal.rr)},
                       {"pc_lower", detail::json_opt(best.causal.pc_lower)},
                       {"groups",
                        {{"a11", detail::json_tally(best.groups.a11)},
                         {"abar11", detail::json_tally(best.groups.abar11)},
                         {"a01", detail::json_tally(best.groups.a01)},
                         {"a00", detail::json_tally(best.groups.a00)},
                         {"abar0", detail::json_tally(best.groups.abar0)}}}};
  } else {
    j["best_model"] = nullptr;
  }
  return j;
}

inline void write_report_json(const analysis_report& rep, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write " + path.string());
  out << to_json(rep).dump(2) << '\n';
}

// Posterior table as a bare JSON array, one object per model.
inline nlohmann::ordered_json to_json(const posterior_table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : table.entries) {
    nlohmann::ordered_json row;
    row["model"] = detail::json_model_indices(e.model);
    row["log_marginal"] = detail::json_opt(e.log_marginal);
    row["log_prior"] = detail::json_finite(e.log_prior);
    row["posterior"] = e.posterior;
    arr.push_back(std::move(row));
  }
  return arr;
}

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_opt(const std::optional<double>& v) {
  return v ? csv_double(*v) : std::string();
}

inline std::string csv_model(const model_id& model) {
  std::string s;
  for (int j : model.indices()) {
    if (!s.empty()) s += ';';
    s += std::to_string(j + 1);
  }
  return s;
}

}  // namespace detail

// Eq. 10 factor over every admissible success split, long form. Values are
// on the probability scale.
inline void write_hypergeom_grid(std::int64_t n00, std::int64_t n01, std::ostream& out,
                                 const beta_prior& prior = {}) {
  if (n00 < 0 || n01 < 0) throw config_error("hypergeom grid: counts must be nonnegative");
  out << "x00,x01,value\n";
  for (std::int64_t x00 = 0; x00 <= n00; ++x00)
    for (std::int64_t x01 = 0; x01 <= n01; ++x01)
      out << x00 << ',' << x01 << ','
          << detail::csv_double(std::exp(factor_a0(n00, x00, n01, x01, prior))) << '\n';
}

// One scatter row per explored model: posterior mass against the two
// condition diagnostics. Undefined ratios stay empty; the top row carries
// best=1.
inline void write_diagnostics_csv(const dataset& data, const posterior_table& table,
                                  std::ostream& out) {
  const partition_index index(data);
  out << "model,posterior,treated_ratio,untreated_e_ratio,best\n";
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    const diagnostics d = sufficiency_diagnostics(index.counts(e.model));
    out << detail::csv_model(e.model) << ',' << detail::csv_double(e.posterior) << ','
        << detail::csv_opt(d.treated_ratio) << ',' << detail::csv_opt(d.untreated_e_ratio) << ','
        << (i == 0 ? 1 : 0) << '\n';
  }
}

}  // namespace coe
