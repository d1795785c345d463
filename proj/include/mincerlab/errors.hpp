#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mincer {

/// Rank-deficient design matrix. `columns` names the offending columns.
class SingularDesignError : public std::runtime_error {
 public:
  SingularDesignError(const std::string& what, std::vector<std::string> columns)
      : std::runtime_error(what), columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// Too few observations for the requested computation.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input: CSV rows, config fields, unknown labels.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mincer
