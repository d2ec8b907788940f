#include "mot/conjugacy.hpp"

#include <algorithm>
#include <numeric>

namespace mot {
namespace {

std::vector<std::vector<std::size_t>> full_domains(const Shape& shape) {
  std::vector<std::vector<std::size_t>> d(shape.order());
  for (std::size_t k = 0; k < shape.order(); ++k) {
    d[k].resize(shape.extent(k));
    std::iota(d[k].begin(), d[k].end(), std::size_t{0});
  }
  return d;
}

template <Scalar T>
void require_index(std::size_t k, const CostTensor<T>& c) {
  if (k >= c.order()) {
    throw Error(ErrorKind::invalid_argument, "conjugation coordinate out of range");
  }
}

}  // namespace

template <Scalar T>
ConjugateResult<T> c_conjugate_over(const PotentialFamily<T>& f, std::size_t k,
                                    const CostTensor<T>& c,
                                    const std::vector<std::vector<std::size_t>>& domains) {
  require_index(k, c);
  require_family_shape(f, c.shape());
  const Shape& shape = c.shape();
  const std::size_t order = shape.order();

  // Odometer over the other coordinates' domains; position k is a
  // placeholder. Visiting domains in sorted order makes the first strict
  // minimum the lexicographically smallest one.
  std::vector<std::size_t> extents(order, 1);
  for (std::size_t l = 0; l < order; ++l) {
    if (l == k) continue;
    if (domains.at(l).empty()) {
      throw Error(ErrorKind::invalid_argument, "empty conjugation domain");
    }
    extents[l] = domains[l].size();
  }
  Shape odometer(extents);

  ConjugateResult<T> out;
  out.values.resize(shape.extent(k));
  out.minimizers.assign(shape.extent(k), MultiIndex{});
  std::vector<bool> seen(shape.extent(k), false);

  MultiIndex pos(order, 0);
  MultiIndex idx(order, 0);
  do {
    T others(0);
    std::size_t base = 0;
    for (std::size_t l = 0; l < order; ++l) {
      if (l == k) continue;
      idx[l] = domains[l][pos[l]];
      others += f[l][idx[l]];
      base += idx[l] * shape.stride(l);
    }
    for (std::size_t a = 0; a < shape.extent(k); ++a) {
      T v = c[base + a * shape.stride(k)] - others;
      if (!seen[a] || v < out.values[a]) {
        seen[a] = true;
        out.values[a] = v;
        idx[k] = a;
        out.minimizers[a] = idx;
      }
    }
  } while (advance(pos, odometer));
  return out;
}

template <Scalar T>
ConjugateResult<T> c_conjugate_with_argmin(const PotentialFamily<T>& f, std::size_t k,
                                           const CostTensor<T>& c) {
  return c_conjugate_over(f, k, c, full_domains(c.shape()));
}

template <Scalar T>
std::vector<T> c_conjugate(const PotentialFamily<T>& f, std::size_t k, const CostTensor<T>& c) {
  return c_conjugate_with_argmin(f, k, c).values;
}

template <Scalar T>
PotentialBounds<T> potential_bounds(std::size_t order, const T& sup_norm) {
  if (order < 3) {
    throw Error(ErrorKind::invalid_argument, "potential bounds need K >= 3");
  }
  if (sup_norm < 0) {
    throw Error(ErrorKind::invalid_argument, "sup norm must be nonnegative");
  }
  const T k(static_cast<long>(order));
  T lower = -(T(2) * k - T(1)) * sup_norm - (k - T(1));
  T upper = T(2) * sup_norm + T(1);
  return {lower, upper};
}

template <Scalar T>
bool within_bounds(const PotentialFamily<T>& f, const PotentialBounds<T>& bounds) {
  for (const auto& fk : f.potentials) {
    for (const T& v : fk) {
      if (v < bounds.lower || v > bounds.upper) return false;
    }
  }
  return true;
}

template <Scalar T>
std::vector<bool> is_conjugate_fixed_point(const PotentialFamily<T>& f, const CostTensor<T>& c,
                                           std::optional<T> tol) {
  const T slack = tol ? *tol : default_tolerance(c.sup_norm());
  std::vector<bool> out(c.order(), false);
  for (std::size_t k = 0; k < c.order(); ++k) {
    std::vector<T> conj = c_conjugate(f, k, c);
    bool same = true;
    for (std::size_t a = 0; a < conj.size() && same; ++a) {
      T diff = conj[a] - f[k][a];
      same = abs_value(diff) <= slack;
    }
    out[k] = same;
  }
  return out;
}

template <Scalar T>
ConjugacyReport<T> improve_sweep(const PotentialFamily<T>& f, const CostTensor<T>& c,
                                 const std::vector<DiscreteMeasure<T>>& marginals,
                                 const SweepOptions& options, std::optional<T> tol) {
  const T slack_tol = tol ? *tol : default_tolerance(c.sup_norm());
  SlackResult<T> slack = admissibility_slack(f, c);
  if (slack.min_slack < -slack_tol) {
    throw Error(ErrorKind::not_admissible, "sweep input violates the cost constraint");
  }
  std::vector<std::size_t> order = options.order;
  if (order.empty()) {
    order.resize(c.order());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  ConjugacyReport<T> report;
  report.dual_value_before = eval_dual_value(f, marginals);
  report.family = f;
  for (std::size_t k : order) {
    require_index(k, c);
    report.family[k] = c_conjugate(report.family, k, c);
  }
  report.dual_value_after = eval_dual_value(report.family, marginals);
  report.is_fixed_point = is_conjugate_fixed_point(report.family, c, tol);
  report.bounds_ok = within_bounds(report.family, potential_bounds(c.order(), c.sup_norm()));
  return report;
}

template <Scalar T>
ConvergenceStudy<T> improve_until_fixed_point(const PotentialFamily<T>& f,
                                              const CostTensor<T>& c,
                                              const std::vector<DiscreteMeasure<T>>& marginals,
                                              std::size_t max_sweeps, std::optional<T> tol) {
  ConvergenceStudy<T> study;
  PotentialFamily<T> current = f;
  T before = eval_dual_value(f, marginals);
  for (std::size_t s = 0; s < max_sweeps; ++s) {
    study.last = improve_sweep(current, c, marginals, {}, tol);
    study.last.dual_value_before = before;
    study.sweeps = s + 1;
    study.dual_values.push_back(study.last.dual_value_after);
    current = study.last.family;
    const auto& fp = study.last.is_fixed_point;
    if (std::all_of(fp.begin(), fp.end(), [](bool b) { return b; })) {
      study.converged = true;
      break;
    }
  }
  return study;
}

template <Scalar T>
PotentialFamily<T> normalize_zero_sum(const PotentialFamily<T>& f, const MultiIndex& anchor) {
  if (anchor.size() != f.order()) {
    throw Error(ErrorKind::shape_mismatch, "anchor has the wrong order");
  }
  T mean(0);
  for (std::size_t k = 0; k < f.order(); ++k) mean += f[k].at(anchor[k]);
  mean /= T(static_cast<long>(f.order()));
  std::vector<T> shifts;
  for (std::size_t k = 0; k < f.order(); ++k) shifts.push_back(mean - f[k][anchor[k]]);
  return add_constants(f, shifts);
}

template <Scalar T>
PotentialFamily<T> normalize_min_zero(const PotentialFamily<T>& f) {
  if (f.order() < 2) {
    throw Error(ErrorKind::invalid_argument, "min-zero gauge needs at least two potentials");
  }
  if (f[0].empty()) {
    throw Error(ErrorKind::shape_mismatch, "first potential is empty");
  }
  T lowest = *std::min_element(f[0].begin(), f[0].end());
  std::vector<T> shifts(f.order(), lowest / T(static_cast<long>(f.order() - 1)));
  shifts[0] = -lowest;
  return add_constants(f, shifts);
}

#define MOT_INSTANTIATE(T)                                                                   \
  template ConjugateResult<T> c_conjugate_over(const PotentialFamily<T>&, std::size_t,       \
                                               const CostTensor<T>&,                         \
                                               const std::vector<std::vector<std::size_t>>&); \
  template ConjugateResult<T> c_conjugate_with_argmin(const PotentialFamily<T>&, std::size_t, \
                                                      const CostTensor<T>&);                 \
  template std::vector<T> c_conjugate(const PotentialFamily<T>&, std::size_t,                \
                                      const CostTensor<T>&);                                 \
  template PotentialBounds<T> potential_bounds(std::size_t, const T&);                       \
  template bool within_bounds(const PotentialFamily<T>&, const PotentialBounds<T>&);         \
  template std::vector<bool> is_conjugate_fixed_point(const PotentialFamily<T>&,             \
                                                      const CostTensor<T>&, std::optional<T>); \
  template ConjugacyReport<T> improve_sweep(const PotentialFamily<T>&, const CostTensor<T>&, \
                                            const std::vector<DiscreteMeasure<T>>&,          \
                                            const SweepOptions&, std::optional<T>);          \
  template ConvergenceStudy<T> improve_until_fixed_point(                                    \
      const PotentialFamily<T>&, const CostTensor<T>&, const std::vector<DiscreteMeasure<T>>&, \
      std::size_t, std::optional<T>);                                                        \
  template PotentialFamily<T> normalize_zero_sum(const PotentialFamily<T>&, const MultiIndex&); \
  template PotentialFamily<T> normalize_min_zero(const PotentialFamily<T>&);

MOT_INSTANTIATE(Rational)
MOT_INSTANTIATE(double)

#undef MOT_INSTANTIATE

}  // namespace mot

namespace mot {

template <Scalar T>
MultiIndex reference_point(const PotentialFamily<T>& f, const std::vector<MultiIndex>& support) {
  if (support.empty()) {
    throw Error(ErrorKind::invalid_argument, "reference point needs a non-empty support");
  }
  std::vector<MultiIndex> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  MultiIndex best = sorted.front();
  T best_sum = f.sum_at(best);
  for (const auto& idx : sorted) {
    T s = f.sum_at(idx);
    if (s > best_sum) {
      best_sum = s;
      best = idx;
    }
  }
  return best;
}

template MultiIndex reference_point(const PotentialFamily<Rational>&, const std::vector<MultiIndex>&);
template MultiIndex reference_point(const PotentialFamily<double>&, const std::vector<MultiIndex>&);

}  // namespace mot
