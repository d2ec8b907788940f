#pragma once

// c-conjugation of potential families, conjugate-improvement sweeps, the
// zero-sum gauges, and the explicit uniform bounds on normalised potentials.
//
// Coordinates are 0-based throughout: k = 0 is the first marginal.

#include <cstddef>
#include <optional>
#include <vector>

#include "mot/core.hpp"

namespace mot {

template <Scalar T>
struct ConjugateResult {
  std::vector<T> values;
  std::vector<MultiIndex> minimizers;  // lexicographically first argmin per atom
};

/// Per atom x_k: min over the other coordinates of c - Sum_{l != k} f_l.
template <Scalar T>
std::vector<T> c_conjugate(const PotentialFamily<T>& f, std::size_t k, const CostTensor<T>& c);

template <Scalar T>
ConjugateResult<T> c_conjugate_with_argmin(const PotentialFamily<T>& f, std::size_t k,
                                           const CostTensor<T>& c);

/// Conjugate whose infimum ranges only over `domains[l]` for l != k (sorted
/// index lists), evaluated at every atom of coordinate k. Entries of f_l
/// outside domains[l] are never read. `domains[k]` is ignored.
template <Scalar T>
ConjugateResult<T> c_conjugate_over(const PotentialFamily<T>& f, std::size_t k,
                                    const CostTensor<T>& c,
                                    const std::vector<std::vector<std::size_t>>& domains);

struct SweepOptions {
  std::vector<std::size_t> order;  // empty: 0, 1, ..., K-1
};

template <Scalar T>
struct ConjugacyReport {
  PotentialFamily<T> family;
  std::vector<bool> is_fixed_point;
  T dual_value_before;
  T dual_value_after;
  bool bounds_ok = false;
};

/// One pass replacing f_k by its conjugate for each k in order. Throws
/// Error(not_admissible) if the input violates Sum f <= c (beyond `tol`).
template <Scalar T>
ConjugacyReport<T> improve_sweep(const PotentialFamily<T>& f, const CostTensor<T>& c,
                                 const std::vector<DiscreteMeasure<T>>& marginals,
                                 const SweepOptions& options = {},
                                 std::optional<T> tol = std::nullopt);

template <Scalar T>
struct ConvergenceStudy {
  ConjugacyReport<T> last;
  std::size_t sweeps = 0;
  bool converged = false;  // every coordinate a fixed point
  std::vector<T> dual_values;  // after each sweep
};

/// Repeats sweeps until a full fixed point or `max_sweeps`. Records the
/// dual values; makes no claim that the limit maximises the dual.
template <Scalar T>
ConvergenceStudy<T> improve_until_fixed_point(const PotentialFamily<T>& f,
                                              const CostTensor<T>& c,
                                              const std::vector<DiscreteMeasure<T>>& marginals,
                                              std::size_t max_sweeps = 100,
                                              std::optional<T> tol = std::nullopt);

/// Shifts s_k = m - f_k(anchor_k) with m the mean of the anchor values, so
/// that all members agree at the anchor. The shifts sum to zero.
template <Scalar T>
PotentialFamily<T> normalize_zero_sum(const PotentialFamily<T>& f, const MultiIndex& anchor);

/// Gauge min f_1 = 0, compensated equally on the other members.
template <Scalar T>
PotentialFamily<T> normalize_min_zero(const PotentialFamily<T>& f);

template <Scalar T>
struct PotentialBounds {
  T lower;
  T upper;
};

/// (-(2K-1) s - (K-1), 2 s + 1) for K marginals and cost sup norm s.
template <Scalar T>
PotentialBounds<T> potential_bounds(std::size_t order, const T& sup_norm);

template <Scalar T>
bool within_bounds(const PotentialFamily<T>& f, const PotentialBounds<T>& bounds);

template <Scalar T>
std::vector<bool> is_conjugate_fixed_point(const PotentialFamily<T>& f, const CostTensor<T>& c,
                                           std::optional<T> tol = std::nullopt);

}  // namespace mot

namespace mot {

/// Lexicographically first argmax of Sum_k f_k over `support` (non-empty).
template <Scalar T>
MultiIndex reference_point(const PotentialFamily<T>& f, const std::vector<MultiIndex>& support);

}  // namespace mot
