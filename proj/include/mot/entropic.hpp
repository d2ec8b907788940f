#pragma once

// Entropic smoothing of c-conjugation: softmin conjugates, the Gibbs plan
// they induce, and multimarginal Sinkhorn (cyclic softmin coordinate
// ascent). As epsilon -> 0 the softmin tends to the hard conjugate.
//
// The bound  0 <= <c, pi_eps> - LP value <= eps * Sum_k log n_k  used by the
// tests comes from the standard entropic OT analysis, not from the duality
// theory implemented elsewhere in this library.

#include <cstddef>
#include <span>
#include <vector>

#include "mot/core.hpp"

namespace mot {

struct EntropicState {
  PotentialFamily<double> family;
  double epsilon = 1.0;
  std::size_t iterations = 0;
  double marginal_residual = 0.0;
  bool converged = false;
};

struct GibbsPlan {
  Coupling<double> plan;
  std::vector<double> residuals;  // L1 deviation of each marginal
  double max_residual() const;
};

struct SinkhornOptions {
  double epsilon = 1.0;  // absolute, same units as the cost
  std::size_t max_iters = 10'000;
  double tol = 1e-9;
};

struct SinkhornResult {
  EntropicState state;
  GibbsPlan gibbs;
  double transport_cost = 0.0;  // <c, pi_eps>
};

/// -eps log Sum_{others} Prod_{l != k} w_l exp((Sum_{l != k} f_l - c) / eps),
/// with max-subtraction. Zero-weight atoms contribute nothing.
std::vector<double> softmin_conjugate(const PotentialFamily<double>& f, std::size_t k,
                                      const CostTensor<double>& c,
                                      const std::vector<DiscreteMeasure<double>>& marginals,
                                      double epsilon);

GibbsPlan gibbs_plan(const PotentialFamily<double>& f, const CostTensor<double>& c,
                     const std::vector<DiscreteMeasure<double>>& marginals, double epsilon);

/// Cyclic updates k = 1..K until the largest marginal residual is <= tol or
/// the budget runs out (state.converged = false; no exception).
SinkhornResult sinkhorn_mmot(const std::vector<DiscreteMeasure<double>>& marginals,
                             const CostTensor<double>& c, const SinkhornOptions& options);

namespace detail {

// Order-agnostic kernels (K >= 2) behind the public entry points.
std::vector<double> softmin_kernel(const std::vector<std::vector<double>>& f, std::size_t k,
                                   const Tensor<double>& c,
                                   const std::vector<std::vector<double>>& weights,
                                   double epsilon);

Tensor<double> gibbs_kernel(const std::vector<std::vector<double>>& f, const Tensor<double>& c,
                            const std::vector<std::vector<double>>& weights, double epsilon);

struct SinkhornKernelResult {
  std::vector<std::vector<double>> potentials;
  Tensor<double> plan;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

SinkhornKernelResult sinkhorn_kernel(const Tensor<double>& c,
                                     const std::vector<std::vector<double>>& weights,
                                     const SinkhornOptions& options);

std::vector<double> marginal_residuals(const Tensor<double>& plan,
                                       const std::vector<std::vector<double>>& weights);

}  // namespace detail
}  // namespace mot
