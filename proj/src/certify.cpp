#include "mot/certify.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mot {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::optimal: return "optimal";
    case Verdict::suboptimal: return "suboptimal";
    case Verdict::infeasible_dual: return "infeasible-dual";
  }
  return "unknown";
}

template <Scalar T>
GapReport<T> duality_gap(const Coupling<T>& pi, const PotentialFamily<T>& f,
                         const CostTensor<T>& c, std::optional<T> tol) {
  const T eps = tol ? *tol : default_tolerance(c.sup_norm());
  std::vector<std::vector<T>> weights;
  for (std::size_t k = 0; k < pi.shape().order(); ++k) weights.push_back(pi.marginal(k));

  GapReport<T> r;
  r.primal_value = eval_primal_cost(pi, c);
  r.dual_value = eval_dual_value(f, weights);
  r.gap = r.primal_value - r.dual_value;
  SlackResult<T> slack = admissibility_slack(f, c);
  r.min_slack = slack.min_slack;
  r.slack_witness = slack.argmin;
  if (slack.min_slack < -eps) {
    r.verdict = Verdict::infeasible_dual;
  } else if (r.gap <= eps) {
    r.verdict = Verdict::optimal;
  } else {
    r.verdict = Verdict::suboptimal;
  }
  return r;
}

template <Scalar T>
std::vector<MultiIndex> extract_support(const Coupling<T>& pi, const T& threshold) {
  if (threshold < 0) {
    throw Error(ErrorKind::invalid_argument, "support threshold must be nonnegative");
  }
  std::vector<MultiIndex> out;
  for (std::size_t off = 0; off < pi.shape().size(); ++off) {
    if (pi[off] > threshold) out.push_back(pi.shape().unravel(off));
  }
  return out;
}

template <Scalar T>
SplittingCheck<T> check_splitting(const std::vector<MultiIndex>& gamma,
                                  const PotentialFamily<T>& f, const CostTensor<T>& c,
                                  std::optional<T> tol) {
  require_family_shape(f, c.shape());
  const T eps = tol ? *tol : default_tolerance(c.sup_norm());
  std::set<std::size_t> on_gamma;
  for (const auto& g : gamma) on_gamma.insert(c.shape().offset(g));

  SplittingCheck<T> out;
  MultiIndex idx(c.order(), 0);
  std::size_t off = 0;
  do {
    T excess = f.sum_at(idx) - c[off];
    if (excess > eps) {
      out.violation = SplittingViolation<T>{idx, SplittingSide::inequality, excess};
      return out;
    }
    if (on_gamma.count(off) && abs_value(excess) > eps) {
      out.violation = SplittingViolation<T>{idx, SplittingSide::equality, excess};
      return out;
    }
    ++off;
  } while (advance(idx, c.shape()));
  out.certificate = SplittingCertificate<T>{gamma, f, eps};
  return out;
}

namespace {

// Nondecreasing index sequences of length n over [0, size): families drawn
// from gamma with repetition, up to reordering.
bool next_multiset(std::vector<std::size_t>& pick, std::size_t size) {
  for (std::size_t i = pick.size(); i-- > 0;) {
    if (pick[i] + 1 < size) {
      ++pick[i];
      for (std::size_t j = i + 1; j < pick.size(); ++j) pick[j] = pick[i];
      return true;
    }
  }
  return false;
}

// Advances sigma_2..sigma_K as one odometer of permutations (sigma_2 outermost).
bool next_permutation_tuple(std::vector<std::vector<std::size_t>>& perms) {
  for (std::size_t i = perms.size(); i-- > 0;) {
    if (std::next_permutation(perms[i].begin(), perms[i].end())) return true;
    // next_permutation wrapped around to the identity.
  }
  return false;
}

}  // namespace

template <Scalar T>
MonotonicityResult<T> check_cyclical_monotonicity(const std::vector<MultiIndex>& gamma,
                                                  const CostTensor<T>& c, std::size_t n_max,
                                                  const MonotonicityGuard& guard,
                                                  std::optional<T> tol) {
  if (n_max > guard.max_cycle || gamma.size() > guard.max_support) {
    throw Error(ErrorKind::size_guard,
                "monotonicity check limited to n_max <= " + std::to_string(guard.max_cycle) +
                    " and |gamma| <= " + std::to_string(guard.max_support));
  }
  const T eps = tol ? *tol : default_tolerance(c.sup_norm());
  std::vector<MultiIndex> sorted = gamma;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& g : sorted) c.shape().offset(g);  // validates

  MonotonicityResult<T> result;
  const std::size_t order = c.order();
  if (sorted.empty()) return result;

  for (std::size_t n = 1; n <= n_max; ++n) {
    std::vector<std::size_t> pick(n, 0);
    do {
      T lhs(0);
      for (std::size_t i = 0; i < n; ++i) lhs += c.at(sorted[pick[i]]);
      std::vector<std::vector<std::size_t>> perms(order - 1, std::vector<std::size_t>(n));
      for (auto& p : perms) std::iota(p.begin(), p.end(), std::size_t{0});
      MultiIndex mixed(order);
      do {
        T rhs(0);
        for (std::size_t i = 0; i < n; ++i) {
          mixed[0] = sorted[pick[i]][0];
          for (std::size_t k = 1; k < order; ++k) mixed[k] = sorted[pick[perms[k - 1][i]]][k];
          rhs += c.at(mixed);
        }
        ++result.families_checked;
        if (lhs > rhs + eps) {
          MonotonicityWitness<T> w;
          for (std::size_t i = 0; i < n; ++i) w.tuples.push_back(sorted[pick[i]]);
          w.permutations = perms;
          w.lhs = lhs;
          w.rhs = rhs;
          result.witness = std::move(w);
          return result;
        }
      } while (next_permutation_tuple(perms));
    } while (next_multiset(pick, sorted.size()));
  }
  return result;
}

#define MOT_INSTANTIATE(T)                                                                   \
  template GapReport<T> duality_gap(const Coupling<T>&, const PotentialFamily<T>&,           \
                                    const CostTensor<T>&, std::optional<T>);                 \
  template std::vector<MultiIndex> extract_support(const Coupling<T>&, const T&);            \
  template SplittingCheck<T> check_splitting(const std::vector<MultiIndex>&,                 \
                                             const PotentialFamily<T>&, const CostTensor<T>&, \
                                             std::optional<T>);                              \
  template MonotonicityResult<T> check_cyclical_monotonicity(                                \
      const std::vector<MultiIndex>&, const CostTensor<T>&, std::size_t,                     \
      const MonotonicityGuard&, std::optional<T>);

MOT_INSTANTIATE(Rational)
MOT_INSTANTIATE(double)

#undef MOT_INSTANTIATE

}  // namespace mot
