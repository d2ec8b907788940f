#pragma once
// Small builders shared by the unit tests.
#include <cstddef>
#include <vector>

#include "mot/core.hpp"
#include "mot/instance.hpp"

namespace mot::testing {

inline Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

template <Scalar T = Rational>
DiscreteMeasure<T> uniform_measure(std::size_t n) {
  std::vector<T> w(n, T(1) / T(static_cast<long>(n)));
  return DiscreteMeasure<T>::create(std::move(w));
}

template <Scalar T = Rational>
std::vector<DiscreteMeasure<T>> uniform_marginals(const std::vector<std::size_t>& dims) {
  std::vector<DiscreteMeasure<T>> out;
  for (std::size_t n : dims) out.push_back(uniform_measure<T>(n));
  return out;
}

inline std::vector<DiscreteMeasure<Rational>> dirac_marginals(std::size_t order) {
  return uniform_marginals<Rational>(std::vector<std::size_t>(order, 1));
}

// c(x) = Sum_k parts[k][x_k].
inline CostTensor<Rational> separable_cost(const std::vector<std::vector<Rational>>& parts) {
  std::vector<std::size_t> dims;
  for (const auto& p : parts) dims.push_back(p.size());
  Shape shape(dims);
  std::vector<Rational> entries;
  MultiIndex idx(dims.size(), 0);
  do {
    Rational v = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) v += parts[k][idx[k]];
    entries.push_back(v);
  } while (advance(idx, shape));
  return CostTensor<Rational>::create(shape, std::move(entries));
}

inline Instance<Rational> fixture(std::uint64_t seed, std::vector<std::size_t> dims) {
  FixtureSpec spec;
  spec.shape = std::move(dims);
  return random_instance(seed, spec);
}

// Random potential family with entries k/denominator in [lo, hi].
inline PotentialFamily<Rational> random_family(FixtureRng& rng, const Shape& shape, long lo,
                                               long hi, long denominator = 4) {
  PotentialFamily<Rational> f = PotentialFamily<Rational>::zeros(shape);
  for (auto& fk : f.potentials) {
    for (auto& v : fk) v = rng.rational(lo, hi, denominator);
  }
  return f;
}

}  // namespace mot::testing
