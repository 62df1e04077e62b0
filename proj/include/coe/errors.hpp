#pragma once

#include <stdexcept>
#include <string>

namespace coe {

// Bad user-supplied settings: flags, generator config, search parameters.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data: CSV schema, row values, target mismatch.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation was asked to exceed a hard resource cap.
class cap_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coe
