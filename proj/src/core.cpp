#include "mot/core.hpp"

#include <algorithm>
#include <set>

namespace mot {

template <Scalar T>
DiscreteMeasure<T> DiscreteMeasure<T>::create(std::vector<T> weights,
                                              std::vector<std::string> atoms,
                                              std::vector<std::vector<double>> coords) {
  if (weights.empty()) {
    throw Error(ErrorKind::invalid_measure, "measure has no atoms");
  }
  if (atoms.empty()) {
    for (std::size_t i = 0; i < weights.size(); ++i) atoms.push_back(std::to_string(i));
  }
  if (atoms.size() != weights.size()) {
    throw Error(ErrorKind::invalid_measure, "atom labels and weights differ in length");
  }
  if (!coords.empty() && coords.size() != weights.size()) {
    throw Error(ErrorKind::invalid_measure, "coordinates must be given for every atom or none");
  }
  if (std::set<std::string>(atoms.begin(), atoms.end()).size() != atoms.size()) {
    throw Error(ErrorKind::invalid_measure, "atom labels are not distinct");
  }
  T total(0);
  for (const T& w : weights) {
    if (!is_finite(w) || w < 0) {
      throw Error(ErrorKind::invalid_measure, "weights must be finite and nonnegative");
    }
    total += w;
  }
  bool unit = false;
  if constexpr (is_exact_v<T>) {
    unit = total == 1;
  } else {
    unit = std::fabs(total - 1.0) <= 1e-12;
  }
  if (!unit) {
    throw Error(ErrorKind::invalid_measure, "weights do not sum to 1");
  }
  DiscreteMeasure m;
  m.weights_ = std::move(weights);
  m.atoms_ = std::move(atoms);
  m.coords_ = std::move(coords);
  return m;
}

template <Scalar T>
DiscreteMeasure<T> DiscreteMeasure<T>::subset(const std::vector<std::size_t>& keep,
                                              std::vector<T> weights) const {
  std::vector<std::string> atoms;
  std::vector<std::vector<double>> coords;
  for (std::size_t i : keep) {
    atoms.push_back(atoms_.at(i));
    if (!coords_.empty()) coords.push_back(coords_[i]);
  }
  return create(std::move(weights), std::move(atoms), std::move(coords));
}

template <Scalar T>
CostTensor<T> CostTensor<T>::create(Shape shape, std::vector<T> entries) {
  return create(Tensor<T>(std::move(shape), std::move(entries)));
}

template <Scalar T>
CostTensor<T> CostTensor<T>::create(Tensor<T> entries) {
  if (entries.shape().order() < 3) {
    throw Error(ErrorKind::shape_mismatch, "cost tensor needs at least three marginals");
  }
  if (entries.size() == 0) {
    throw Error(ErrorKind::shape_mismatch, "cost tensor has an empty axis");
  }
  CostTensor c;
  c.sup_norm_ = T(0);
  for (const T& x : entries.data()) {
    if (!is_finite(x)) {
      throw Error(ErrorKind::invalid_argument, "cost entries must be finite");
    }
    T a = abs_value(x);
    if (a > c.sup_norm_) c.sup_norm_ = a;
  }
  c.entries_ = std::move(entries);
  return c;
}

template <Scalar T>
T CostTensor<T>::min_entry() const {
  return *std::min_element(entries_.data().begin(), entries_.data().end());
}

template <Scalar T>
CostTensor<T> CostTensor<T>::restrict(const std::vector<std::vector<std::size_t>>& keep) const {
  return create(restrict_tensor(entries_, keep));
}

template <Scalar T>
Coupling<T>::Coupling(Tensor<T> mass) : mass_(std::move(mass)) {
  for (const T& x : mass_.data()) {
    if (!is_finite(x) || x < 0) {
      throw Error(ErrorKind::invalid_argument, "coupling entries must be nonnegative");
    }
  }
}

template <Scalar T>
T Coupling<T>::total_mass() const {
  T total(0);
  for (const T& x : mass_.data()) total += x;
  return total;
}

template <Scalar T>
std::vector<T> Coupling<T>::marginal(std::size_t k) const {
  const Shape& s = shape();
  std::vector<T> out(s.extent(k), T(0));
  const std::size_t stride = s.stride(k);
  const std::size_t extent = s.extent(k);
  for (std::size_t off = 0; off < s.size(); ++off) {
    out[(off / stride) % extent] += mass_[off];
  }
  return out;
}

template <Scalar T>
PotentialFamily<T> PotentialFamily<T>::zeros(const Shape& shape) {
  PotentialFamily f;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    f.potentials.emplace_back(shape.extent(k), T(0));
  }
  return f;
}

template <Scalar T>
T PotentialFamily<T>::sum_at(std::span<const std::size_t> index) const {
  T s(0);
  for (std::size_t k = 0; k < potentials.size(); ++k) s += potentials[k][index[k]];
  return s;
}

template <Scalar T>
Shape shape_of(const std::vector<DiscreteMeasure<T>>& marginals) {
  std::vector<std::size_t> dims;
  for (const auto& m : marginals) dims.push_back(m.size());
  return Shape(std::move(dims));
}

template <Scalar T>
bool is_feasible(const Coupling<T>& pi, const std::vector<DiscreteMeasure<T>>& marginals,
                 const T& tol) {
  if (!(pi.shape() == shape_of(marginals))) return false;
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    std::vector<T> got = pi.marginal(k);
    for (std::size_t i = 0; i < got.size(); ++i) {
      T diff = got[i] - marginals[k].weight(i);
      if (abs_value(diff) > tol) return false;
    }
  }
  return true;
}

template <Scalar T>
void require_feasible(const Coupling<T>& pi, const std::vector<DiscreteMeasure<T>>& marginals,
                      const T& tol) {
  if (!(pi.shape() == shape_of(marginals))) {
    throw Error(ErrorKind::shape_mismatch, "coupling shape does not match the marginals");
  }
  if (!is_feasible(pi, marginals, tol)) {
    throw Error(ErrorKind::marginal_mismatch, "coupling marginals differ from the prescribed ones");
  }
}

template <Scalar T>
Coupling<T> product_coupling(const std::vector<DiscreteMeasure<T>>& marginals) {
  Shape s = shape_of(marginals);
  Tensor<T> t(s, T(1));
  MultiIndex idx(s.order(), 0);
  std::size_t off = 0;
  do {
    T p(1);
    for (std::size_t k = 0; k < idx.size(); ++k) p *= marginals[k].weight(idx[k]);
    t[off++] = p;
  } while (advance(idx, s));
  return Coupling<T>(std::move(t));
}

template <Scalar T>
T eval_primal_cost(const Coupling<T>& pi, const CostTensor<T>& c) {
  if (!(pi.shape() == c.shape())) {
    throw Error(ErrorKind::shape_mismatch, "coupling and cost shapes differ");
  }
  T total(0);
  for (std::size_t off = 0; off < c.size(); ++off) {
    if (pi[off] != 0) total += c[off] * pi[off];
  }
  return total;
}

template <Scalar T>
T eval_dual_value(const PotentialFamily<T>& f, const std::vector<std::vector<T>>& weights) {
  if (f.order() != weights.size()) {
    throw Error(ErrorKind::shape_mismatch, "potential family and marginals differ in count");
  }
  T total(0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (f[k].size() != weights[k].size()) {
      throw Error(ErrorKind::shape_mismatch, "potential length differs from marginal size");
    }
    for (std::size_t i = 0; i < weights[k].size(); ++i) total += f[k][i] * weights[k][i];
  }
  return total;
}

template <Scalar T>
T eval_dual_value(const PotentialFamily<T>& f, const std::vector<DiscreteMeasure<T>>& marginals) {
  std::vector<std::vector<T>> w;
  w.reserve(marginals.size());
  for (const auto& m : marginals) w.push_back(m.weights());
  return eval_dual_value(f, w);
}

template <Scalar T>
void require_family_shape(const PotentialFamily<T>& f, const Shape& shape) {
  if (f.order() != shape.order()) {
    throw Error(ErrorKind::shape_mismatch, "potential family has the wrong number of members");
  }
  for (std::size_t k = 0; k < f.order(); ++k) {
    if (f[k].size() != shape.extent(k)) {
      throw Error(ErrorKind::shape_mismatch, "potential length differs from cost extent");
    }
  }
}

template <Scalar T>
Tensor<T> slack_tensor(const PotentialFamily<T>& f, const CostTensor<T>& c) {
  require_family_shape(f, c.shape());
  Tensor<T> out(c.shape(), T(0));
  MultiIndex idx(c.order(), 0);
  std::size_t off = 0;
  do {
    out[off] = c[off] - f.sum_at(idx);
    ++off;
  } while (advance(idx, c.shape()));
  return out;
}

template <Scalar T>
SlackResult<T> admissibility_slack(const PotentialFamily<T>& f, const CostTensor<T>& c) {
  require_family_shape(f, c.shape());
  MultiIndex idx(c.order(), 0);
  SlackResult<T> best{c[0] - f.sum_at(idx), idx};
  std::size_t off = 0;
  do {
    T s = c[off] - f.sum_at(idx);
    if (s < best.min_slack) {
      best.min_slack = s;
      best.argmin = idx;
    }
    ++off;
  } while (advance(idx, c.shape()));
  return best;
}

template <Scalar T>
CostTensor<T> shift_cost(const CostTensor<T>& c, const T& shift) {
  std::vector<T> data = c.data();
  for (T& x : data) x += shift;
  return CostTensor<T>::create(c.shape(), std::move(data));
}

template <Scalar T>
PotentialFamily<T> add_constants(const PotentialFamily<T>& f, const std::vector<T>& shifts) {
  if (shifts.size() != f.order()) {
    throw Error(ErrorKind::shape_mismatch, "one shift per potential is required");
  }
  PotentialFamily<T> out = f;
  for (std::size_t k = 0; k < out.order(); ++k) {
    for (T& v : out[k]) v += shifts[k];
  }
  return out;
}

#define MOT_INSTANTIATE(T)                                                                     \
  template class DiscreteMeasure<T>;                                                           \
  template class CostTensor<T>;                                                                \
  template class Coupling<T>;                                                                  \
  template struct PotentialFamily<T>;                                                          \
  template Shape shape_of(const std::vector<DiscreteMeasure<T>>&);                             \
  template bool is_feasible(const Coupling<T>&, const std::vector<DiscreteMeasure<T>>&,       \
                            const T&);                                                         \
  template void require_feasible(const Coupling<T>&, const std::vector<DiscreteMeasure<T>>&,  \
                                 const T&);                                                    \
  template Coupling<T> product_coupling(const std::vector<DiscreteMeasure<T>>&);              \
  template T eval_primal_cost(const Coupling<T>&, const CostTensor<T>&);                      \
  template T eval_dual_value(const PotentialFamily<T>&, const std::vector<std::vector<T>>&);  \
  template T eval_dual_value(const PotentialFamily<T>&, const std::vector<DiscreteMeasure<T>>&); \
  template void require_family_shape(const PotentialFamily<T>&, const Shape&);                \
  template Tensor<T> slack_tensor(const PotentialFamily<T>&, const CostTensor<T>&);           \
  template SlackResult<T> admissibility_slack(const PotentialFamily<T>&, const CostTensor<T>&); \
  template CostTensor<T> shift_cost(const CostTensor<T>&, const T&);                          \
  template PotentialFamily<T> add_constants(const PotentialFamily<T>&, const std::vector<T>&);

MOT_INSTANTIATE(Rational)
MOT_INSTANTIATE(double)

#undef MOT_INSTANTIATE

}  // namespace mot
