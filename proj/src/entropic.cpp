#include "mot/entropic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mot {
namespace detail {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_epsilon(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::invalid_argument, "entropic epsilon must be positive");
  }
}

std::vector<std::vector<double>> log_weights(const std::vector<std::vector<double>>& weights) {
  std::vector<std::vector<double>> out(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (double w : weights[k]) out[k].push_back(w > 0 ? std::log(w) : kNegInf);
  }
  return out;
}

void check_shapes(const std::vector<std::vector<double>>& f, const Tensor<double>& c,
                  const std::vector<std::vector<double>>& weights) {
  const Shape& s = c.shape();
  if (f.size() != s.order() || weights.size() != s.order()) {
    throw Error(ErrorKind::shape_mismatch, "entropic inputs disagree on the number of marginals");
  }
  for (std::size_t k = 0; k < s.order(); ++k) {
    if (f[k].size() != s.extent(k) || weights[k].size() != s.extent(k)) {
      throw Error(ErrorKind::shape_mismatch, "entropic inputs disagree on marginal sizes");
    }
  }
}

}  // namespace

std::vector<double> softmin_kernel(const std::vector<std::vector<double>>& f, std::size_t k,
                                   const Tensor<double>& c,
                                   const std::vector<std::vector<double>>& weights,
                                   double epsilon) {
  check_epsilon(epsilon);
  check_shapes(f, c, weights);
  const Shape& s = c.shape();
  if (k >= s.order()) throw Error(ErrorKind::invalid_argument, "softmin coordinate out of range");
  const auto logw = log_weights(weights);
  const std::size_t n = s.extent(k);

  // Exponent of each term: Sum_{l != k} (log w_l + f_l / eps) - c / eps.
  auto exponent = [&](const MultiIndex& idx, std::size_t off) {
    double a = -c[off] / epsilon;
    for (std::size_t l = 0; l < s.order(); ++l) {
      if (l == k) continue;
      a += logw[l][idx[l]] + f[l][idx[l]] / epsilon;
    }
    return a;
  };

  std::vector<double> peak(n, kNegInf);
  MultiIndex idx(s.order(), 0);
  std::size_t off = 0;
  do {
    double a = exponent(idx, off);
    peak[idx[k]] = std::max(peak[idx[k]], a);
    ++off;
  } while (advance(idx, s));

  std::vector<double> sum(n, 0.0);
  std::fill(idx.begin(), idx.end(), 0);
  off = 0;
  do {
    double a = exponent(idx, off);
    if (a != kNegInf) sum[idx[k]] += std::exp(a - peak[idx[k]]);
    ++off;
  } while (advance(idx, s));

  std::vector<double> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    if (peak[a] == kNegInf) {
      throw Error(ErrorKind::numeric, "softmin over an empty support");
    }
    out[a] = -epsilon * (peak[a] + std::log(sum[a]));
  }
  return out;
}

Tensor<double> gibbs_kernel(const std::vector<std::vector<double>>& f, const Tensor<double>& c,
                            const std::vector<std::vector<double>>& weights, double epsilon) {
  check_epsilon(epsilon);
  check_shapes(f, c, weights);
  const Shape& s = c.shape();
  const auto logw = log_weights(weights);
  Tensor<double> logp(s, 0.0);
  double peak = kNegInf;
  MultiIndex idx(s.order(), 0);
  std::size_t off = 0;
  do {
    double a = -c[off] / epsilon;
    for (std::size_t l = 0; l < s.order(); ++l) a += logw[l][idx[l]] + f[l][idx[l]] / epsilon;
    logp[off] = a;
    peak = std::max(peak, a);
    ++off;
  } while (advance(idx, s));
  double total = 0.0;
  for (double& v : logp.data()) {
    v = v == kNegInf ? 0.0 : std::exp(v - peak);
    total += v;
  }
  for (double& v : logp.data()) v /= total;
  return logp;
}

std::vector<double> marginal_residuals(const Tensor<double>& plan,
                                       const std::vector<std::vector<double>>& weights) {
  const Shape& s = plan.shape();
  std::vector<double> out;
  for (std::size_t k = 0; k < s.order(); ++k) {
    std::vector<double> m(s.extent(k), 0.0);
    for (std::size_t off = 0; off < s.size(); ++off) m[s.coordinate(off, k)] += plan[off];
    double r = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) r += std::fabs(m[a] - weights[k][a]);
    out.push_back(r);
  }
  return out;
}

SinkhornKernelResult sinkhorn_kernel(const Tensor<double>& c,
                                     const std::vector<std::vector<double>>& weights,
                                     const SinkhornOptions& options) {
  check_epsilon(options.epsilon);
  const Shape& s = c.shape();
  SinkhornKernelResult r;
  for (std::size_t k = 0; k < s.order(); ++k) r.potentials.emplace_back(s.extent(k), 0.0);
  check_shapes(r.potentials, c, weights);
  while (r.iterations < options.max_iters) {
    for (std::size_t k = 0; k < s.order(); ++k) {
      r.potentials[k] = softmin_kernel(r.potentials, k, c, weights, options.epsilon);
    }
    ++r.iterations;
    r.plan = gibbs_kernel(r.potentials, c, weights, options.epsilon);
    auto res = marginal_residuals(r.plan, weights);
    r.residual = *std::max_element(res.begin(), res.end());
    if (r.residual <= options.tol) {
      r.converged = true;
      break;
    }
  }
  if (r.iterations == 0) {
    r.plan = gibbs_kernel(r.potentials, c, weights, options.epsilon);
    auto res = marginal_residuals(r.plan, weights);
    r.residual = *std::max_element(res.begin(), res.end());
  }
  return r;
}

}  // namespace detail

namespace {

std::vector<std::vector<double>> weights_of(const std::vector<DiscreteMeasure<double>>& marginals) {
  std::vector<std::vector<double>> w;
  for (const auto& m : marginals) w.push_back(m.weights());
  return w;
}

}  // namespace

double GibbsPlan::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

std::vector<double> softmin_conjugate(const PotentialFamily<double>& f, std::size_t k,
                                      const CostTensor<double>& c,
                                      const std::vector<DiscreteMeasure<double>>& marginals,
                                      double epsilon) {
  return detail::softmin_kernel(f.potentials, k, c.tensor(), weights_of(marginals), epsilon);
}

GibbsPlan gibbs_plan(const PotentialFamily<double>& f, const CostTensor<double>& c,
                     const std::vector<DiscreteMeasure<double>>& marginals, double epsilon) {
  auto w = weights_of(marginals);
  Tensor<double> plan = detail::gibbs_kernel(f.potentials, c.tensor(), w, epsilon);
  auto residuals = detail::marginal_residuals(plan, w);
  return GibbsPlan{Coupling<double>(std::move(plan)), std::move(residuals)};
}

SinkhornResult sinkhorn_mmot(const std::vector<DiscreteMeasure<double>>& marginals,
                             const CostTensor<double>& c, const SinkhornOptions& options) {
  auto w = weights_of(marginals);
  if (!(shape_of(marginals) == c.shape())) {
    throw Error(ErrorKind::shape_mismatch, "cost extents differ from marginal sizes");
  }
  detail::SinkhornKernelResult k = detail::sinkhorn_kernel(c.tensor(), w, options);
  auto residuals = detail::marginal_residuals(k.plan, w);
  SinkhornResult out{
      EntropicState{PotentialFamily<double>{std::move(k.potentials)}, options.epsilon,
                    k.iterations, k.residual, k.converged},
      GibbsPlan{Coupling<double>(std::move(k.plan)), std::move(residuals)}, 0.0};
  out.transport_cost = eval_primal_cost(out.gibbs.plan, c);
  return out;
}

}  // namespace mot
