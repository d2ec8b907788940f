#pragma once

#include <stdexcept>
#include <string>

namespace mot {

enum class ErrorKind {
  shape_mismatch,
  invalid_measure,
  invalid_argument,
  size_guard,
  not_admissible,
  marginal_mismatch,
  infeasible,
  schema,
  numeric,  // iteration budget exhausted or numerical breakdown
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mot
