#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coe/errors.hpp"

namespace coe {

// Masks over covariate indices cap k; see model_id.
inline constexpr int max_covariates = 63;

struct covariate_schema {
  std::vector<std::string> names;   // length k, unique, non-empty
  std::vector<int> cardinalities;   // per covariate, levels coded 0..c-1, c >= 2

  int size() const { return static_cast<int>(names.size()); }

  void validate() const {
    if (names.empty()) throw data_error("schema: need at least one covariate");
    if (names.size() != cardinalities.size())
      throw data_error("schema: names/cardinalities length mismatch");
    if (names.size() > std::size_t(max_covariates))
      throw data_error("schema: too many covariate columns (max 63)");
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j].empty()) throw data_error("schema: empty covariate name");
      if (cardinalities[j] < 2)
        throw data_error("schema: cardinality of " + names[j] + " must be >= 2");
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j])
          throw data_error("schema: duplicate covariate name " + names[i]);
  }

  bool operator==(const covariate_schema&) const = default;
};

// One study subject.
struct trial_record {
  std::string id;
  int treatment = 0;  // T
  int desire = 0;     // E
  int response = 0;   // R
  std::vector<int> covariates;

  bool operator==(const trial_record&) const = default;
};

// The individual being scored. Kept outside the record list: her response
// enters the likelihood predictively, never as a counted group member.
struct target_spec {
  std::vector<int> covariates;
  int desire = 1;
  int response = 1;

  bool operator==(const target_spec&) const = default;
};

struct dataset {
  covariate_schema schema;
  std::vector<trial_record> records;
  target_spec target;

  int num_covariates() const { return schema.size(); }

  void validate() const {
    schema.validate();
    auto check_levels = [&](const std::vector<int>& cov, const std::string& who) {
      if (cov.size() != std::size_t(schema.size()))
        throw data_error(who + ": covariate vector length mismatch");
      for (std::size_t j = 0; j < cov.size(); ++j)
        if (cov[j] < 0 || cov[j] >= schema.cardinalities[j])
          throw data_error(who + ": level " + std::to_string(cov[j]) +
                           " outside cardinality of " + schema.names[j]);
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      const std::string who = "record " + std::to_string(i + 1);
      if (r.treatment != 0 && r.treatment != 1) throw data_error(who + ": T not binary");
      if (r.desire != 0 && r.desire != 1) throw data_error(who + ": E not binary");
      if (r.response != 0 && r.response != 1) throw data_error(who + ": R not binary");
      check_levels(r.covariates, who);
    }
    check_levels(target.covariates, "target");
    if (target.desire != 0 && target.desire != 1) throw data_error("target: E not binary");
    if (target.response != 0 && target.response != 1) throw data_error("target: R not binary");
  }

  bool operator==(const dataset&) const = default;
};

struct load_options {
  target_spec target;
  // Declared per-covariate level counts; inferred from the data and the
  // target when absent.
  std::optional<std::vector<int>> cardinalities;
  std::string id_column = "id";
  std::string treatment_column = "T";
  std::string desire_column = "E";
  std::string response_column = "R";
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline int parse_int_cell(const std::string& cell, std::size_t row, const std::string& column) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(cell, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != cell.size() || cell.empty())
    throw data_error("row " + std::to_string(row) + ", column " + column +
                     ": not an integer: '" + cell + "'");
  return v;
}

inline int parse_binary_cell(const std::string& cell, std::size_t row, const std::string& column) {
  int v = parse_int_cell(cell, row, column);
  if (v != 0 && v != 1)
    throw data_error("row " + std::to_string(row) + ", column " + column +
                     ": expected 0 or 1, got " + std::to_string(v));
  return v;
}

}  // namespace detail

// Reads a trial CSV with header id,T,E,R,H1,...,Hk (column names configurable
// through load_options). Row order is preserved; k is inferred from the
// header. The returned dataset is fully validated.
inline dataset load_dataset(const std::filesystem::path& csv_path, const load_options& options) {
  std::ifstream in(csv_path);
  if (!in) throw data_error("cannot open " + csv_path.string());

  std::string line;
  if (!std::getline(in, line)) throw data_error(csv_path.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = detail::split_csv_line(line);
  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw data_error(csv_path.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column_of(options.id_column);
  const std::size_t t_col = column_of(options.treatment_column);
  const std::size_t e_col = column_of(options.desire_column);
  const std::size_t r_col = column_of(options.response_column);

  std::vector<std::size_t> cov_cols;
  std::vector<std::string> cov_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == id_col || c == t_col || c == e_col || c == r_col) continue;
    cov_cols.push_back(c);
    cov_names.push_back(header[c]);
  }
  if (cov_cols.empty()) throw data_error(csv_path.string() + ": no covariate columns in header");

  dataset data;
  data.target = options.target;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw data_error("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    trial_record rec;
    rec.id = cells[id_col];
    rec.treatment = detail::parse_binary_cell(cells[t_col], row, options.treatment_column);
    rec.desire = detail::parse_binary_cell(cells[e_col], row, options.desire_column);
    rec.response = detail::parse_binary_cell(cells[r_col], row, options.response_column);
    rec.covariates.reserve(cov_cols.size());
    for (std::size_t j = 0; j < cov_cols.size(); ++j) {
      int level = detail::parse_int_cell(cells[cov_cols[j]], row, cov_names[j]);
      if (level < 0)
        throw data_error("row " + std::to_string(row) + ", column " + cov_names[j] +
                         ": negative level");
      rec.covariates.push_back(level);
    }
    data.records.push_back(std::move(rec));
  }

  data.schema.names = cov_names;
  if (options.cardinalities) {
    data.schema.cardinalities = *options.cardinalities;
    if (data.schema.cardinalities.size() != cov_names.size())
      throw data_error("declared cardinalities do not match covariate column count");
    // Re-walk rows so violations carry a row index.
    for (std::size_t i = 0; i < data.records.size(); ++i)
      for (std::size_t j = 0; j < cov_names.size(); ++j)
        if (data.records[i].covariates[j] >= data.schema.cardinalities[j])
          throw data_error("row " + std::to_string(i + 1) + ", column " + cov_names[j] +
                           ": level " + std::to_string(data.records[i].covariates[j]) +
                           " outside declared cardinality " +
                           std::to_string(data.schema.cardinalities[j]));
  } else {
    std::vector<int> card(cov_names.size(), 2);
    for (const auto& rec : data.records)
      for (std::size_t j = 0; j < cov_names.size(); ++j)
        card[j] = std::max(card[j], rec.covariates[j] + 1);
    if (data.target.covariates.size() == cov_names.size())
      for (std::size_t j = 0; j < cov_names.size(); ++j)
        card[j] = std::max(card[j], data.target.covariates[j] + 1);
    data.schema.cardinalities = std::move(card);
  }

  data.validate();
  return data;
}

inline void write_dataset(const dataset& data, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw data_error("cannot write " + csv_path.string());
  out << "id,T,E,R";
  for (const auto& name : data.schema.names) out << ',' << name;
  out << '\n';
  for (const auto& rec : data.records) {
    out << rec.id << ',' << rec.treatment << ',' << rec.desire << ',' << rec.response;
    for (int level : rec.covariates) out << ',' << level;
    out << '\n';
  }
}

}  // namespace coe
