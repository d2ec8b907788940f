#pragma once

// Problem documents: a JSON schema for marginals and costs (see
// docs/problem-format.md), exact parsing of weights and costs, and canonical
// serialisation.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mot/instance.hpp"

namespace mot {

enum class NumericMode { rational, floating };

NumericMode parse_mode(std::string_view text);
const char* to_string(NumericMode mode);

inline constexpr const char* kProblemVersion = "mot-problem/1";
inline constexpr const char* kReportVersion = "mot-report/1";

struct MarginalSpec {
  std::vector<std::string> atoms;
  std::vector<std::vector<double>> coords;  // empty when absent
  std::vector<Rational> weights;

  friend bool operator==(const MarginalSpec&, const MarginalSpec&) = default;
};

struct PairwiseTerm {
  std::size_t first;
  std::size_t second;
  std::vector<std::vector<Rational>> matrix;  // extent(first) x extent(second)

  friend bool operator==(const PairwiseTerm&, const PairwiseTerm&) = default;
};

struct CostSpec {
  enum class Kind { tensor, pairwise_sum };
  Kind kind = Kind::tensor;
  std::vector<Rational> entries;   // tensor: row-major, last index fastest
  std::vector<PairwiseTerm> pairs; // pairwise-sum: one term per unordered pair

  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

struct ProblemDocument {
  std::string version = kProblemVersion;
  std::vector<MarginalSpec> marginals;
  CostSpec cost;

  std::size_t order() const { return marginals.size(); }
  Shape shape() const;
  /// Dense cost; pairwise-sum documents are expanded here, on demand.
  CostTensor<Rational> cost_tensor(std::size_t guard_entries) const;

  friend bool operator==(const ProblemDocument&, const ProblemDocument&) = default;
};

/// Validates structure, exact weight sums (within 1e-12 in floating mode),
/// and shapes. Errors carry a JSON path, e.g. "$.marginals[1].weights[0]".
ProblemDocument parse_problem(std::string_view text, NumericMode mode = NumericMode::rational);
ProblemDocument problem_from_json(const nlohmann::json& doc, NumericMode mode = NumericMode::rational);

nlohmann::json to_json(const ProblemDocument& doc);
std::string serialize_problem(const ProblemDocument& doc);

/// Instance with zero-weight atoms pruned; one warning per pruned marginal.
template <Scalar T>
Instance<T> make_instance(const ProblemDocument& doc, std::vector<std::string>& warnings,
                          std::size_t guard_entries);

ProblemDocument document_from_instance(const Instance<Rational>& instance);

/// "fnv1a64:<16 hex digits>" over the canonical serialisation.
std::string instance_digest(const ProblemDocument& doc);

/// {"exact": "p/q", "decimal": x}
nlohmann::json exact_value(const Rational& x);
nlohmann::json exact_value(double x);

}  // namespace mot
