#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mot/core.hpp"

namespace mot {

template <Scalar T>
struct Instance {
  std::vector<DiscreteMeasure<T>> marginals;
  CostTensor<T> cost;
};

/// Rational instance to either numeric mode. Double weights are renormalised
/// to absorb rounding.
template <Scalar T>
Instance<T> convert_instance(const Instance<Rational>& exact);

struct FixtureSpec {
  std::vector<std::size_t> shape{2, 2, 2};
  long cost_min = -5;        // cost entries are k / cost_denominator with
  long cost_max = 5;         // cost_min <= k / cost_denominator <= cost_max
  long cost_denominator = 4;
  long weight_max = 9;       // weights drawn from 1..weight_max, normalised
};

/// Deterministic random rational instance drawn from FixtureRng.
Instance<Rational> random_instance(std::uint64_t seed, const FixtureSpec& spec);

/// Small deterministic integer source shared by fixtures and fuzz tests.
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed);
  long uniform(long lo, long hi);  // inclusive
  Rational rational(long lo, long hi, long denominator);
  std::vector<Rational> simplex_weights(std::size_t n, long max_weight);

 private:
  std::uint64_t state_[4];
  std::uint64_t next();
};

}  // namespace mot
