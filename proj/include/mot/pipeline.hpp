#pragma once

// Solve-and-certify: exact primal optimum, its LP duals normalised at the
// reference point and pushed through one conjugate sweep, and the gap.

#include "mot/certify.hpp"
#include "mot/conjugacy.hpp"
#include "mot/lp.hpp"

namespace mot {

template <Scalar T>
struct SolveOutcome {
  PrimalSolution<T> primal;
  MultiIndex anchor;
  ConjugacyReport<T> improved;
  GapReport<T> gap;
};

template <Scalar T>
SolveOutcome<T> solve_with_certified_duals(const std::vector<DiscreteMeasure<T>>& marginals,
                                           const CostTensor<T>& cost,
                                           std::size_t guard_entries = kDefaultGuardEntries,
                                           const SimplexOptions& options = {});

}  // namespace mot
