#pragma once

// Domain types of the discrete multimarginal problem and the two Kantorovich
// functionals: the primal cost of a coupling and the dual value of a
// potential family.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mot/error.hpp"
#include "mot/scalar.hpp"
#include "mot/tensor.hpp"

namespace mot {

// Finite probability vector over labelled atoms.
template <Scalar T>
class DiscreteMeasure {
 public:
  /// Validates: weights >= 0, sum exactly 1 (rational) or within 1e-12
  /// (double), distinct labels. Empty `atoms` yields labels "0", "1", ...
  /// `coords` is either empty or one vector per atom.
  static DiscreteMeasure create(std::vector<T> weights,
                                std::vector<std::string> atoms = {},
                                std::vector<std::vector<double>> coords = {});

  std::size_t size() const { return weights_.size(); }
  const std::vector<T>& weights() const { return weights_; }
  const T& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::vector<std::vector<double>>& coords() const { return coords_; }

  /// Sub-measure on `keep` with the given (already normalised) weights.
  DiscreteMeasure subset(const std::vector<std::size_t>& keep, std::vector<T> weights) const;

 private:
  DiscreteMeasure() = default;

  std::vector<T> weights_;
  std::vector<std::string> atoms_;
  std::vector<std::vector<double>> coords_;
};

// Dense K-index cost array (K >= 3) with its cached sup norm.
template <Scalar T>
class CostTensor {
 public:
  static CostTensor create(Shape shape, std::vector<T> entries);
  static CostTensor create(Tensor<T> entries);

  const Shape& shape() const { return entries_.shape(); }
  std::size_t order() const { return entries_.shape().order(); }
  std::size_t size() const { return entries_.size(); }
  const Tensor<T>& tensor() const { return entries_; }
  const std::vector<T>& data() const { return entries_.data(); }
  const T& operator[](std::size_t offset) const { return entries_[offset]; }
  const T& at(std::span<const std::size_t> index) const { return entries_.at(index); }
  const T& sup_norm() const { return sup_norm_; }
  T min_entry() const;

  CostTensor restrict(const std::vector<std::vector<std::size_t>>& keep) const;

 private:
  CostTensor() = default;

  Tensor<T> entries_;
  T sup_norm_{};
};

// Nonnegative K-index mass tensor. Feasibility against a list of marginals is
// checked by `require_feasible`, not at construction, so approximately
// feasible plans (entropic) share the type.
template <Scalar T>
class Coupling {
 public:
  explicit Coupling(Tensor<T> mass);

  const Shape& shape() const { return mass_.shape(); }
  const Tensor<T>& tensor() const { return mass_; }
  const std::vector<T>& data() const { return mass_.data(); }
  const T& operator[](std::size_t offset) const { return mass_[offset]; }
  const T& at(std::span<const std::size_t> index) const { return mass_.at(index); }

  T total_mass() const;
  std::vector<T> marginal(std::size_t k) const;

 private:
  Tensor<T> mass_;
};

template <Scalar T>
struct PotentialFamily {
  std::vector<std::vector<T>> potentials;

  std::size_t order() const { return potentials.size(); }
  std::vector<T>& operator[](std::size_t k) { return potentials[k]; }
  const std::vector<T>& operator[](std::size_t k) const { return potentials[k]; }

  /// Zero family with the extents of `shape`.
  static PotentialFamily zeros(const Shape& shape);
  /// Sum_k f_k(index_k).
  T sum_at(std::span<const std::size_t> index) const;

  friend bool operator==(const PotentialFamily&, const PotentialFamily&) = default;
};

template <Scalar T>
struct SlackResult {
  T min_slack;
  MultiIndex argmin;  // lexicographically first minimiser
};

template <Scalar T>
Shape shape_of(const std::vector<DiscreteMeasure<T>>& marginals);

/// Throws Error(marginal_mismatch) unless every marginal of `pi` matches
/// `marginals` exactly (rational) or within `tol` in L-infinity (double).
template <Scalar T>
void require_feasible(const Coupling<T>& pi, const std::vector<DiscreteMeasure<T>>& marginals,
                      const T& tol = T(0));

template <Scalar T>
bool is_feasible(const Coupling<T>& pi, const std::vector<DiscreteMeasure<T>>& marginals,
                 const T& tol = T(0));

/// Product coupling mu_1 x ... x mu_K (always feasible).
template <Scalar T>
Coupling<T> product_coupling(const std::vector<DiscreteMeasure<T>>& marginals);

/// Sum over all multi-indices of c * pi.
template <Scalar T>
T eval_primal_cost(const Coupling<T>& pi, const CostTensor<T>& c);

/// Sum_k <f_k, weights_k>.
template <Scalar T>
T eval_dual_value(const PotentialFamily<T>& f, const std::vector<DiscreteMeasure<T>>& marginals);

/// Same with raw weight vectors (used where a plan supplies the marginals).
template <Scalar T>
T eval_dual_value(const PotentialFamily<T>& f, const std::vector<std::vector<T>>& weights);

/// min over all multi-indices of c - Sum_k f_k, with a witness.
template <Scalar T>
SlackResult<T> admissibility_slack(const PotentialFamily<T>& f, const CostTensor<T>& c);

/// Full tensor c - Sum_k f_k.
template <Scalar T>
Tensor<T> slack_tensor(const PotentialFamily<T>& f, const CostTensor<T>& c);

/// c + M with the sup norm recomputed.
template <Scalar T>
CostTensor<T> shift_cost(const CostTensor<T>& c, const T& shift);

/// f_k + shifts[k] for every k.
template <Scalar T>
PotentialFamily<T> add_constants(const PotentialFamily<T>& f, const std::vector<T>& shifts);

template <Scalar T>
void require_family_shape(const PotentialFamily<T>& f, const Shape& shape);

}  // namespace mot
