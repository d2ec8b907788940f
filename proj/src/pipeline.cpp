#include "mot/pipeline.hpp"

namespace mot {

template <Scalar T>
SolveOutcome<T> solve_with_certified_duals(const std::vector<DiscreteMeasure<T>>& marginals,
                                           const CostTensor<T>& cost, std::size_t guard_entries,
                                           const SimplexOptions& options) {
  MotLinearProgram<T> lp = build_lp(marginals, cost, guard_entries);
  PrimalSolution<T> primal = solve_primal(lp, options);
  const T zero(0);
  MultiIndex anchor =
      reference_point(primal.dual_multipliers, extract_support(primal.coupling, zero));
  PotentialFamily<T> normalized = normalize_zero_sum(primal.dual_multipliers, anchor);
  ConjugacyReport<T> improved = improve_sweep(normalized, cost, marginals);
  GapReport<T> gap = duality_gap(primal.coupling, improved.family, cost);
  return {std::move(primal), std::move(anchor), std::move(improved), std::move(gap)};
}

template SolveOutcome<Rational> solve_with_certified_duals(
    const std::vector<DiscreteMeasure<Rational>>&, const CostTensor<Rational>&, std::size_t,
    const SimplexOptions&);
template SolveOutcome<double> solve_with_certified_duals(
    const std::vector<DiscreteMeasure<double>>&, const CostTensor<double>&, std::size_t,
    const SimplexOptions&);

}  // namespace mot
