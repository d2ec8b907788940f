#pragma once

// The multimarginal Kantorovich problem as a linear program over the K-index
// transportation polytope, solved by a revised simplex method.

#include <cstddef>
#include <vector>

#include "mot/core.hpp"

namespace mot {

inline constexpr std::size_t kDefaultGuardEntries = 1'000'000;

struct ConstraintRow {
  std::size_t marginal;
  std::size_t atom;
  bool redundant;  // dropped before solving: last atom of every marginal after the first
};

template <Scalar T>
struct MotLinearProgram {
  Shape shape;
  std::vector<T> objective;  // flattened cost, row-major
  std::vector<ConstraintRow> rows;
  std::vector<T> rhs;        // concatenated marginal weights, aligned with rows
  T sup_norm{};

  std::size_t variable_count() const { return shape.size(); }
  std::size_t row_count() const { return rows.size(); }
  /// Rows the solver keeps; equals the rank of the constraint matrix.
  std::size_t independent_row_count() const;
  /// Dense 0/1 matrix with every row, redundant ones included.
  std::vector<std::vector<int>> constraint_matrix() const;
};

template <Scalar T>
struct PrimalSolution {
  Coupling<T> coupling;
  T value;
  PotentialFamily<T> dual_multipliers;
  std::vector<MultiIndex> basis;  // basic variables, lexicographic order
  std::size_t iterations = 0;
};

struct SimplexOptions {
  std::size_t max_iterations = 1'000'000;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
  /// Exact mode only: locate the optimal basis in doubles first, then
  /// refactor and finish exactly. Falls back to a pure exact run if the
  /// floating basis is not exactly feasible.
  bool float_warm_start = true;
};

template <Scalar T>
MotLinearProgram<T> build_lp(const std::vector<DiscreteMeasure<T>>& marginals,
                             const CostTensor<T>& cost,
                             std::size_t guard_entries = kDefaultGuardEntries);

template <Scalar T>
PrimalSolution<T> solve_primal(const MotLinearProgram<T>& lp, const SimplexOptions& options = {});

/// Every basic feasible solution, deduplicated. Intended as a desk-scale
/// oracle; refuses programs with more than `max_variables` variables.
template <Scalar T>
std::vector<Coupling<T>> enumerate_vertices(const MotLinearProgram<T>& lp,
                                            std::size_t max_variables = 16);

}  // namespace mot
