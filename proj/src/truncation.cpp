#include "mot/truncation.hpp"

#include <algorithm>
#include <numeric>

#include "mot/certify.hpp"

namespace mot {
namespace {

template <Scalar T>
void require_eps(const T& eps, std::size_t order) {
  if (!(eps > 0) || eps > 1) {
    throw Error(ErrorKind::invalid_argument, "eps must lie in (0, 1]");
  }
  T total = eps * T(static_cast<long>(order));
  if (!(total < 1)) {
    throw Error(ErrorKind::invalid_argument, "K * eps must be below 1");
  }
}

template <Scalar T>
bool in_core(const Shape& shape, std::size_t off, const std::vector<std::vector<bool>>& member) {
  for (std::size_t k = 0; k < shape.order(); ++k) {
    if (!member[k][shape.coordinate(off, k)]) return false;
  }
  return true;
}

template <Scalar T>
std::vector<std::vector<bool>> membership(const Shape& shape, const CoreSets<T>& core) {
  if (core.indices.size() != shape.order()) {
    throw Error(ErrorKind::shape_mismatch, "core sets do not match the coupling order");
  }
  std::vector<std::vector<bool>> member(shape.order());
  for (std::size_t k = 0; k < shape.order(); ++k) {
    member[k].assign(shape.extent(k), false);
    for (std::size_t i : core.indices[k]) member[k].at(i) = true;
  }
  return member;
}

template <Scalar T>
BoundCheck<T> at_most(std::string name, const T& lhs, const T& rhs) {
  bool ok = lhs <= rhs;
  return {std::move(name), lhs, rhs, ok};
}

}  // namespace

template <Scalar T>
bool TruncationReport<T>::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

template <Scalar T>
CoreSets<T> select_core_sets(const std::vector<DiscreteMeasure<T>>& marginals, const T& eps) {
  require_eps(eps, marginals.size());
  CoreSets<T> core;
  core.epsilon = eps;
  const T target = T(1) - eps;
  for (const auto& m : marginals) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m.weight(a) > m.weight(b); });
    std::vector<std::size_t> kept;
    T mass(0);
    for (std::size_t i : order) {
      if (mass >= target) break;
      kept.push_back(i);
      mass += m.weight(i);
    }
    std::sort(kept.begin(), kept.end());
    core.indices.push_back(std::move(kept));
    core.captured_mass.push_back(mass);
  }
  return core;
}

template <Scalar T>
Restriction<T> restrict_renormalize(const Coupling<T>& pi, const CoreSets<T>& core) {
  membership(pi.shape(), core);
  Tensor<T> sub = restrict_tensor(pi.tensor(), core.indices);
  T mass(0);
  for (const T& x : sub.data()) mass += x;
  if (!(mass > 0)) {
    throw Error(ErrorKind::invalid_argument, "coupling has no mass on the core product");
  }
  for (T& x : sub.data()) x /= mass;
  Coupling<T> plan(std::move(sub));

  std::vector<DiscreteMeasure<T>> marginals;
  for (std::size_t k = 0; k < plan.shape().order(); ++k) {
    std::vector<T> w = plan.marginal(k);
    if constexpr (!is_exact_v<T>) {
      T total = std::accumulate(w.begin(), w.end(), T(0));
      for (T& x : w) x /= total;
    }
    std::vector<std::string> labels;
    for (std::size_t i : core.indices[k]) labels.push_back(std::to_string(i));
    marginals.push_back(DiscreteMeasure<T>::create(std::move(w), std::move(labels)));
  }
  return {std::move(plan), std::move(marginals), mass};
}

template <Scalar T>
Coupling<T> glue(const Coupling<T>& core_plan, const Coupling<T>& pi, const CoreSets<T>& core) {
  const Shape& shape = pi.shape();
  auto member = membership(shape, core);
  Restriction<T> reference = restrict_renormalize(pi, core);
  if (!(core_plan.shape() == reference.plan.shape())) {
    throw Error(ErrorKind::shape_mismatch, "core plan does not live on the core product");
  }
  T tol(0);
  if constexpr (!is_exact_v<T>) tol = 1e-9;
  if (!is_feasible(core_plan, reference.marginals, tol)) {
    throw Error(ErrorKind::marginal_mismatch, "core plan marginals differ from the restricted ones");
  }

  Tensor<T> mass(shape, T(0));
  for (std::size_t off = 0; off < shape.size(); ++off) {
    if (!in_core<T>(shape, off, member)) mass[off] = pi[off];
  }
  const Shape& sub = core_plan.shape();
  MultiIndex local(sub.order(), 0);
  MultiIndex global(sub.order(), 0);
  std::size_t off = 0;
  do {
    for (std::size_t k = 0; k < sub.order(); ++k) global[k] = core.indices[k][local[k]];
    mass.at(global) = reference.core_mass * core_plan[off++];
  } while (advance(local, sub));
  return Coupling<T>(std::move(mass));
}

template <Scalar T>
TruncationReport<T> run_truncation_experiment(const std::vector<DiscreteMeasure<T>>& marginals,
                                              const CostTensor<T>& cost, const T& eps,
                                              const TruncationOptions<T>& options,
                                              const std::optional<PrimalSolution<T>>& full_solution) {
  const std::size_t order = marginals.size();
  require_eps(eps, order);
  const Shape& shape = cost.shape();
  const T K(static_cast<long>(order));
  const T& norm = cost.sup_norm();

  PrimalSolution<T> full = full_solution
                               ? *full_solution
                               : solve_primal(build_lp(marginals, cost, options.guard_entries),
                                              options.simplex);
  require_feasible(full.coupling, marginals, is_exact_v<T> ? T(0) : T(1e-9));

  CoreSets<T> core = select_core_sets(marginals, eps);
  Restriction<T> restricted = restrict_renormalize(full.coupling, core);
  CostTensor<T> core_cost = cost.restrict(core.indices);

  PrimalSolution<T> core_opt = solve_primal(
      build_lp(restricted.marginals, core_cost, options.guard_entries), options.simplex);
  Coupling<T> glued = glue(core_opt.coupling, full.coupling, core);

  TruncationReport<T> r;
  r.eps = eps;
  r.sup_norm = norm;
  r.bound_constant = (T(2) * K - T(1)) * norm + (K - T(1));
  r.complement_mass = T(1) - restricted.core_mass;
  r.inf_full = full.value;
  r.inf_truncated = core_opt.value;
  r.glued_cost = eval_primal_cost(glued, cost);
  for (const auto& idx : core.indices) r.core_sizes.push_back(idx.size());

  // Core potentials embedded in full index space, normalised at the
  // reference point of the restricted optimal plan.
  const T zero(0);
  MultiIndex anchor = reference_point(core_opt.dual_multipliers,
                                      extract_support(restricted.plan, zero));
  PotentialFamily<T> core_family = normalize_zero_sum(core_opt.dual_multipliers, anchor);
  PotentialFamily<T> embedded = PotentialFamily<T>::zeros(shape);
  for (std::size_t k = 0; k < order; ++k) {
    for (std::size_t i = 0; i < core.indices[k].size(); ++i) {
      embedded[k][core.indices[k][i]] = core_family[k][i];
    }
  }
  // Successive conjugation with the infimum over the core sets, evaluated at
  // every atom of the full space.
  for (std::size_t k = 0; k < order; ++k) {
    embedded[k] = c_conjugate_over(embedded, k, cost, core.indices).values;
  }
  r.extended_family = embedded;

  PotentialFamily<T> on_core = PotentialFamily<T>::zeros(core_cost.shape());
  for (std::size_t k = 0; k < order; ++k) {
    for (std::size_t i = 0; i < core.indices[k].size(); ++i) {
      on_core[k][i] = embedded[k][core.indices[k][i]];
    }
  }
  r.dual_full = eval_dual_value(embedded, marginals);
  r.dual_truncated = eval_dual_value(on_core, restricted.marginals);

  // The glued plan keeps the full marginals; exact in rational mode.
  T glue_defect(0);
  for (std::size_t k = 0; k < order; ++k) {
    std::vector<T> got = glued.marginal(k);
    for (std::size_t i = 0; i < got.size(); ++i) {
      T d = abs_value(T(got[i] - marginals[k].weight(i)));
      if (d > glue_defect) glue_defect = d;
    }
  }
  const T slack = is_exact_v<T> ? T(0) : T(1e-9 * (1.0 + to_double(norm)));

  T max_abs(0);
  T lowest = embedded[0][0];
  T highest = embedded[0][0];
  for (const auto& fk : embedded.potentials) {
    for (const T& v : fk) {
      if (abs_value(v) > max_abs) max_abs = abs_value(v);
      if (v < lowest) lowest = v;
      if (v > highest) highest = v;
    }
  }
  PotentialBounds<T> pb = potential_bounds(order, norm);
  const T K2C = T(2) * K * K * r.bound_constant;
  const T twoKnorm = T(2) * K * norm;

  r.checks.push_back(at_most<T>("glued_marginals_exact", glue_defect, slack));
  r.checks.push_back(at_most<T>("a_complement_mass", r.complement_mass, T(K * eps)));
  r.checks.push_back(at_most<T>("b_glued_vs_truncated_cost",
                                abs_value(T(r.glued_cost - r.inf_truncated)),
                                T(twoKnorm * eps + slack)));
  r.checks.push_back(at_most<T>("c_potentials_abs_le_C", max_abs, T(r.bound_constant + slack)));
  r.checks.push_back(at_most<T>("c_potentials_upper", highest, T(pb.upper + slack)));
  r.checks.push_back(at_most<T>("c_potentials_lower", T(-lowest), T(-pb.lower + slack)));
  r.checks.push_back(at_most<T>("d_dual_full_vs_truncated",
                                abs_value(T(r.dual_full - r.dual_truncated)),
                                T(K2C * eps + slack)));
  r.checks.push_back(at_most<T>(
      "e_dual_near_primal", T(r.inf_full - r.dual_full),
      T((twoKnorm + T(1) + K2C) * eps + slack)));
  r.checks.push_back(at_most<T>("value_gap_full_vs_truncated",
                                abs_value(T(r.inf_full - r.inf_truncated)),
                                T(twoKnorm * eps + slack)));
  return r;
}

template <Scalar T>
std::vector<TruncationReport<T>> run_truncation_ladder(
    const std::vector<DiscreteMeasure<T>>& marginals, const CostTensor<T>& cost,
    const std::vector<T>& ladder, const TruncationOptions<T>& options) {
  for (const T& eps : ladder) require_eps(eps, marginals.size());
  std::optional<PrimalSolution<T>> full =
      solve_primal(build_lp(marginals, cost, options.guard_entries), options.simplex);
  std::vector<TruncationReport<T>> out;
  for (const T& eps : ladder) {
    out.push_back(run_truncation_experiment(marginals, cost, eps, options, full));
  }
  return out;
}

#define MOT_INSTANTIATE(T)                                                                    \
  template struct TruncationReport<T>;                                                        \
  template CoreSets<T> select_core_sets(const std::vector<DiscreteMeasure<T>>&, const T&);   \
  template Restriction<T> restrict_renormalize(const Coupling<T>&, const CoreSets<T>&);      \
  template Coupling<T> glue(const Coupling<T>&, const Coupling<T>&, const CoreSets<T>&);     \
  template TruncationReport<T> run_truncation_experiment(                                     \
      const std::vector<DiscreteMeasure<T>>&, const CostTensor<T>&, const T&,                 \
      const TruncationOptions<T>&, const std::optional<PrimalSolution<T>>&);                  \
  template std::vector<TruncationReport<T>> run_truncation_ladder(                            \
      const std::vector<DiscreteMeasure<T>>&, const CostTensor<T>&, const std::vector<T>&,    \
      const TruncationOptions<T>&);

MOT_INSTANTIATE(Rational)
MOT_INSTANTIATE(double)

#undef MOT_INSTANTIATE

}  // namespace mot
