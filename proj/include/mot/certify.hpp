#pragma once

// Optimality certificates: duality gap, support extraction, c-splitting
// verification and c-cyclical monotonicity.

#include <cstddef>
#include <optional>
#include <vector>

#include "mot/core.hpp"

namespace mot {

enum class Verdict { optimal, suboptimal, infeasible_dual };

const char* to_string(Verdict v);

template <Scalar T>
struct GapReport {
  T primal_value;
  T dual_value;
  T gap;  // primal - dual
  Verdict verdict = Verdict::suboptimal;
  T min_slack;
  MultiIndex slack_witness;  // where the dual constraint is tightest (or violated)
};

/// Primal cost of `pi` against the dual value of `f` on the marginals of `pi`.
template <Scalar T>
GapReport<T> duality_gap(const Coupling<T>& pi, const PotentialFamily<T>& f,
                         const CostTensor<T>& c, std::optional<T> tol = std::nullopt);

/// Multi-indices carrying mass strictly above `threshold`, lexicographic order.
template <Scalar T>
std::vector<MultiIndex> extract_support(const Coupling<T>& pi, const T& threshold = T(0));

template <Scalar T>
struct SplittingCertificate {
  std::vector<MultiIndex> gamma;
  PotentialFamily<T> family;
  T tolerance;
};

enum class SplittingSide { inequality, equality };

template <Scalar T>
struct SplittingViolation {
  MultiIndex index;
  SplittingSide side;
  T excess;  // Sum f - c at the index
};

template <Scalar T>
struct SplittingCheck {
  std::optional<SplittingCertificate<T>> certificate;
  std::optional<SplittingViolation<T>> violation;

  explicit operator bool() const { return certificate.has_value(); }
};

/// Certificate iff Sum f <= c + tol everywhere and |Sum f - c| <= tol on
/// gamma. Otherwise the lexicographically first failing multi-index.
template <Scalar T>
SplittingCheck<T> check_splitting(const std::vector<MultiIndex>& gamma,
                                  const PotentialFamily<T>& f, const CostTensor<T>& c,
                                  std::optional<T> tol = std::nullopt);

template <Scalar T>
struct MonotonicityWitness {
  std::vector<MultiIndex> tuples;
  std::vector<std::vector<std::size_t>> permutations;  // sigma_2 .. sigma_K
  T lhs;
  T rhs;
};

template <Scalar T>
struct MonotonicityResult {
  std::optional<MonotonicityWitness<T>> witness;
  std::size_t families_checked = 0;

  bool passed() const { return !witness.has_value(); }
};

struct MonotonicityGuard {
  std::size_t max_cycle = 3;
  std::size_t max_support = 12;
};

/// For every n <= n_max, every n-family of gamma drawn with repetition, and
/// every choice of permutations of coordinates 2..K, checks that permuting
/// cannot lower the total cost. Throws Error(size_guard) past the guard.
template <Scalar T>
MonotonicityResult<T> check_cyclical_monotonicity(const std::vector<MultiIndex>& gamma,
                                                  const CostTensor<T>& c, std::size_t n_max,
                                                  const MonotonicityGuard& guard = {},
                                                  std::optional<T> tol = std::nullopt);

}  // namespace mot
