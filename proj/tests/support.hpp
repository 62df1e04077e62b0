#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coe/dataset.hpp"

namespace support {

// Six records over two binary covariates, target (H1,H2)=(1,0), E=1, R=1.
// Small enough that every group tally is checkable by hand:
//   empty model: a11=(2,1) abar11=(1,1) a01=(1,1) a00=(2,1) abar0=(0,0)
//   {H1}:        a11=(2,1) abar11=(1,1) a01=(1,1) a00=(1,0) abar0=(1,1)
// and the empty-model marginal is exactly 1/72.
inline coe::dataset toy_dataset() {
  coe::dataset data;
  data.schema.names = {"H1", "H2"};
  data.schema.cardinalities = {2, 2};
  data.target.covariates = {1, 0};
  data.target.desire = 1;
  data.target.response = 1;
  auto rec = [](const char* id, int t, int e, int r, int h1, int h2) {
    coe::trial_record out;
    out.id = id;
    out.treatment = t;
    out.desire = e;
    out.response = r;
    out.covariates = {h1, h2};
    return out;
  };
  data.records = {
      rec("1", 1, 1, 1, 1, 0), rec("2", 1, 1, 0, 1, 0), rec("3", 0, 1, 1, 1, 0),
      rec("4", 0, 0, 0, 1, 0), rec("5", 0, 0, 1, 0, 1), rec("6", 1, 0, 1, 0, 1),
  };
  data.validate();
  return data;
}

inline std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "coe_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = temp_dir() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace support
