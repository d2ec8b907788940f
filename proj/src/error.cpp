#include "mot/error.hpp"

namespace mot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::invalid_measure: return "invalid_measure";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::size_guard: return "size_guard";
    case ErrorKind::not_admissible: return "not_admissible";
    case ErrorKind::marginal_mismatch: return "marginal_mismatch";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::schema: return "schema";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace mot
