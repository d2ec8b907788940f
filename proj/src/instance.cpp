#include "mot/instance.hpp"

#include <numeric>
#include <random>

namespace mot {

template <Scalar T>
Instance<T> convert_instance(const Instance<Rational>& exact) {
  if constexpr (is_exact_v<T>) {
    return exact;
  } else {
    std::vector<DiscreteMeasure<double>> marginals;
    for (const auto& m : exact.marginals) {
      std::vector<double> w;
      for (const auto& x : m.weights()) w.push_back(x.get_d());
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& x : w) x /= total;
      marginals.push_back(DiscreteMeasure<double>::create(std::move(w), m.atoms(), m.coords()));
    }
    std::vector<double> c;
    for (const auto& x : exact.cost.data()) c.push_back(x.get_d());
    return Instance<double>{std::move(marginals),
                            CostTensor<double>::create(exact.cost.shape(), std::move(c))};
  }
}

template Instance<Rational> convert_instance(const Instance<Rational>&);
template Instance<double> convert_instance(const Instance<Rational>&);

FixtureRng::FixtureRng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 engine(seq);
  for (auto& s : state_) s = engine();
}

// xoshiro256** step; fully specified so fixtures are identical everywhere.
std::uint64_t FixtureRng::next() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

long FixtureRng::uniform(long lo, long hi) {
  if (hi < lo) throw Error(ErrorKind::invalid_argument, "empty integer range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(next() % span);
}

Rational FixtureRng::rational(long lo, long hi, long denominator) {
  Rational r(uniform(lo * denominator, hi * denominator), denominator);
  r.canonicalize();
  return r;
}

std::vector<Rational> FixtureRng::simplex_weights(std::size_t n, long max_weight) {
  std::vector<long> raw(n);
  long total = 0;
  for (auto& w : raw) {
    w = uniform(1, max_weight);
    total += w;
  }
  std::vector<Rational> out;
  for (long w : raw) {
    Rational r(w, total);
    r.canonicalize();
    out.push_back(r);
  }
  return out;
}

Instance<Rational> random_instance(std::uint64_t seed, const FixtureSpec& spec) {
  FixtureRng rng(seed);
  std::vector<DiscreteMeasure<Rational>> marginals;
  for (std::size_t n : spec.shape) {
    marginals.push_back(DiscreteMeasure<Rational>::create(rng.simplex_weights(n, spec.weight_max)));
  }
  Shape shape(spec.shape);
  std::vector<Rational> cost;
  cost.reserve(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    cost.push_back(rng.rational(spec.cost_min, spec.cost_max, spec.cost_denominator));
  }
  return Instance<Rational>{std::move(marginals), CostTensor<Rational>::create(shape, std::move(cost))};
}

}  // namespace mot
