#pragma once

// Replays the truncation argument for duality on large discrete instances:
// mass-greedy core sets, the renormalised restriction of an optimal plan,
// gluing a core optimum back into a full plan, the extension of core
// potentials to the full spaces, and every quantitative bound along the way.

#include <optional>
#include <string>
#include <vector>

#include "mot/conjugacy.hpp"
#include "mot/lp.hpp"

namespace mot {

template <Scalar T>
struct CoreSets {
  std::vector<std::vector<std::size_t>> indices;  // ascending atom indices per marginal
  T epsilon;
  std::vector<T> captured_mass;
};

/// Keeps the heaviest atoms (ties by lower index) of each marginal until the
/// kept mass reaches 1 - eps. Requires 0 < eps <= 1 and K * eps < 1.
template <Scalar T>
CoreSets<T> select_core_sets(const std::vector<DiscreteMeasure<T>>& marginals, const T& eps);

template <Scalar T>
struct Restriction {
  Coupling<T> plan;                          // on the core product, total mass 1
  std::vector<DiscreteMeasure<T>> marginals; // marginals of `plan`, core atoms only
  T core_mass;                               // pi(X0) before renormalisation
};

template <Scalar T>
Restriction<T> restrict_renormalize(const Coupling<T>& pi, const CoreSets<T>& core);

/// core_mass * core_plan (embedded) + pi outside the core product.
template <Scalar T>
Coupling<T> glue(const Coupling<T>& core_plan, const Coupling<T>& pi, const CoreSets<T>& core);

template <Scalar T>
struct BoundCheck {
  std::string name;
  T lhs;
  T rhs;
  bool ok = false;
};

template <Scalar T>
struct TruncationReport {
  T eps;
  T sup_norm;
  T bound_constant;      // C = (2K-1)|c| + (K-1)
  T complement_mass;     // pi_*((X0)^c)
  T inf_full;            // I(pi_*)
  T inf_truncated;       // I0(core optimum)
  T glued_cost;          // I(glued plan)
  T dual_full;           // J(extended potentials)
  T dual_truncated;      // J0(extended potentials)
  std::vector<std::size_t> core_sizes;
  PotentialFamily<T> extended_family;
  std::vector<BoundCheck<T>> checks;

  bool all_passed() const;
};

template <Scalar T>
struct TruncationOptions {
  std::size_t guard_entries = kDefaultGuardEntries;
  SimplexOptions simplex;
};

/// Full pipeline for one eps. `full_solution` may carry a precomputed exact
/// optimum of the full instance (shared across an eps ladder).
template <Scalar T>
TruncationReport<T> run_truncation_experiment(
    const std::vector<DiscreteMeasure<T>>& marginals, const CostTensor<T>& cost, const T& eps,
    const TruncationOptions<T>& options = {},
    const std::optional<PrimalSolution<T>>& full_solution = std::nullopt);

template <Scalar T>
std::vector<TruncationReport<T>> run_truncation_ladder(
    const std::vector<DiscreteMeasure<T>>& marginals, const CostTensor<T>& cost,
    const std::vector<T>& ladder, const TruncationOptions<T>& options = {});

}  // namespace mot
