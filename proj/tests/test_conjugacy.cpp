#include <doctest.h>

#include "fixtures.hpp"
#include "mot/conjugacy.hpp"
#include "mot/lp.hpp"

using namespace mot;
using namespace mot::testing;

namespace {

CostTensor<Rational> bilinear_cost() {
  // c = x1 x2 + x2 x3 on {0,1}^3
  std::vector<Rational> e;
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long d = 0; d < 2; ++d) e.push_back(q(a * b + b * d));
  return CostTensor<Rational>::create(Shape({2, 2, 2}), e);
}

PotentialFamily<Rational> admissible_random(FixtureRng& rng, const CostTensor<Rational>& c) {
  auto f = random_family(rng, c.shape(), -4, 4);
  auto slack = admissibility_slack(f, c).min_slack;
  for (auto& v : f[0]) v += slack;
  return f;
}

}  // namespace

TEST_CASE("c_conjugate examples") {
  auto zero = CostTensor<Rational>::create(Shape({2, 3, 2}), std::vector<Rational>(12, q(0)));
  auto f = PotentialFamily<Rational>::zeros(zero.shape());
  CHECK(c_conjugate(f, 1, zero) == std::vector<Rational>(3, q(0)));
  auto constant = CostTensor<Rational>::create(Shape({2, 3, 2}), std::vector<Rational>(12, q(5, 2)));
  CHECK(c_conjugate(f, 2, constant) == std::vector<Rational>(2, q(5, 2)));

  auto c = bilinear_cost();
  PotentialFamily<Rational> g{{{q(7), q(9)}, {q(0), q(-1)}, {q(0), q(0)}}};
  auto r = c_conjugate_with_argmin(g, 0, c);
  CHECK(r.values == std::vector<Rational>{q(0), q(0)});
  CHECK(r.minimizers[0] == MultiIndex{0, 0, 0});
  CHECK(r.minimizers[1] == MultiIndex{1, 0, 0});
}

TEST_CASE("c_conjugate matches brute force and ignores f_k") {
  FixtureRng rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = fixture(seed, {2, 3, 4});
    auto f = random_family(rng, inst.cost.shape(), -3, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      auto values = c_conjugate(f, k, inst.cost);
      std::vector<std::optional<Rational>> oracle(inst.cost.shape().extent(k));
      MultiIndex idx(3, 0);
      do {
        Rational v = inst.cost.at(idx);
        for (std::size_t l = 0; l < 3; ++l)
          if (l != k) v -= f[l][idx[l]];
        auto& slot = oracle[idx[k]];
        if (!slot || v < *slot) slot = v;
      } while (advance(idx, inst.cost.shape()));
      for (std::size_t i = 0; i < values.size(); ++i) CHECK(values[i] == *oracle[i]);
      auto g = f;
      for (auto& v : g[k]) v += 100;
      CHECK(c_conjugate(g, k, inst.cost) == values);
    }
  }
}

TEST_CASE("c_conjugate_over restricts the infimum") {
  auto inst = fixture(3, {3, 3, 3});
  FixtureRng rng(3);
  auto f = random_family(rng, inst.cost.shape(), -2, 2);
  std::vector<std::vector<std::size_t>> all{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  CHECK(c_conjugate_over(f, 1, inst.cost, all).values == c_conjugate(f, 1, inst.cost));
  std::vector<std::vector<std::size_t>> some{{}, {0, 2}, {1}};
  auto r = c_conjugate_over(f, 0, inst.cost, some);
  for (std::size_t a = 0; a < 3; ++a) {
    Rational best = inst.cost.at(MultiIndex{a, 0, 1}) - f[1][0] - f[2][1];
    best = std::min(best, Rational(inst.cost.at(MultiIndex{a, 2, 1}) - f[1][2] - f[2][1]));
    CHECK(r.values[a] == best);
  }
}

TEST_CASE("improve_sweep") {
  SUBCASE("zero family on a nonnegative cost") {
    auto inst = fixture(12, {2, 3, 2});
    auto c = shift_cost(inst.cost, inst.cost.sup_norm());
    auto f = PotentialFamily<Rational>::zeros(c.shape());
    auto report = improve_sweep(f, c, inst.marginals);
    // The first coordinate becomes the partial minimum of c.
    for (std::size_t a = 0; a < 2; ++a) {
      Rational m = c.at(MultiIndex{a, 0, 0});
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t d = 0; d < 2; ++d) m = std::min(m, Rational(c.at(MultiIndex{a, b, d})));
      CHECK(report.family[0][a] == m);
    }
    CHECK(report.dual_value_after >= report.dual_value_before);
    CHECK(report.dual_value_before == 0);
  }
  SUBCASE("already conjugate family is a fixed point") {
    auto inst = fixture(13, {3, 2, 2});
    FixtureRng rng(1);
    auto once = improve_sweep(admissible_random(rng, inst.cost), inst.cost, inst.marginals);
    auto twice = improve_sweep(once.family, inst.cost, inst.marginals);
    CHECK(twice.family == once.family);
    CHECK(twice.dual_value_after == once.dual_value_after);
  }
  SUBCASE("LP multipliers keep their dual value") {
    auto inst = fixture(14, {3, 3, 3});
    auto sol = solve_primal(build_lp(inst.marginals, inst.cost));
    auto report = improve_sweep(sol.dual_multipliers, inst.cost, inst.marginals);
    CHECK(report.dual_value_after == sol.value);
    CHECK(report.dual_value_before == sol.value);
  }
  SUBCASE("inadmissible input is rejected") {
    auto inst = fixture(15, {2, 2, 2});
    auto f = PotentialFamily<Rational>::zeros(inst.cost.shape());
    f[0] = {inst.cost.sup_norm() + 1, q(0)};
    try {
      improve_sweep(f, inst.cost, inst.marginals);
      FAIL("expected not_admissible");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_admissible);
    }
  }
}

TEST_CASE("sweep properties on fuzzed families") {
  FixtureRng rng(99);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto inst = fixture(seed, {2 + seed % 2, 3, 2});
    auto f = admissible_random(rng, inst.cost);
    for (std::size_t k = 0; k < 3; ++k) {
      auto g = c_conjugate(f, k, inst.cost);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] >= f[k][i]);
      auto h = f;
      h[k] = g;
      CHECK(c_conjugate(h, k, inst.cost) == g);
    }
    auto report = improve_sweep(f, inst.cost, inst.marginals);
    CHECK(admissibility_slack(report.family, inst.cost).min_slack >= 0);
    CHECK(report.dual_value_after >= report.dual_value_before);
    CHECK(report.is_fixed_point.back());
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < f[k].size(); ++i) CHECK(report.family[k][i] >= f[k][i]);
  }
}

TEST_CASE("improve_until_fixed_point records a non-decreasing trace") {
  FixtureRng rng(4);
  auto inst = fixture(31, {3, 3, 3});
  auto study = improve_until_fixed_point(admissible_random(rng, inst.cost), inst.cost,
                                         inst.marginals);
  CHECK(study.sweeps >= 1);
  CHECK(study.dual_values.size() == study.sweeps);
  for (std::size_t i = 1; i < study.dual_values.size(); ++i)
    CHECK(study.dual_values[i] >= study.dual_values[i - 1]);
  if (study.converged) {
    for (bool b : is_conjugate_fixed_point(study.last.family, inst.cost)) CHECK(b);
  }
}

TEST_CASE("normalize_zero_sum") {
  Shape s({2, 2, 2});
  PotentialFamily<Rational> f{{{q(3), q(0)}, {q(1), q(4)}, {q(-1), q(2)}}};
  auto g = normalize_zero_sum(f, MultiIndex{0, 0, 0});
  CHECK(g[0][0] == 1);
  CHECK(g[1][0] == 1);
  CHECK(g[2][0] == 1);
  CHECK(g[0][1] == -2);
  CHECK(g[1][1] == 4);
  CHECK(g[2][1] == 4);
  CHECK(normalize_zero_sum(g, MultiIndex{0, 0, 0}) == g);

  FixtureRng rng(6);
  auto inst = fixture(17, {3, 2, 4});
  for (int t = 0; t < 10; ++t) {
    auto h = random_family(rng, inst.cost.shape(), -5, 5, 7);
    auto n = normalize_zero_sum(h, MultiIndex{2, 1, 3});
    CHECK(eval_dual_value(n, inst.marginals) == eval_dual_value(h, inst.marginals));
    CHECK(slack_tensor(n, inst.cost).data() == slack_tensor(h, inst.cost).data());
  }
}

TEST_CASE("normalize_min_zero") {
  PotentialFamily<Rational> f{{{q(2), q(5)}, {q(0), q(1)}, {q(3), q(3)}}};
  auto g = normalize_min_zero(f);
  CHECK(g[0] == std::vector<Rational>{q(0), q(3)});
  CHECK(g[1] == std::vector<Rational>{q(1), q(2)});
  CHECK(g[2] == std::vector<Rational>{q(4), q(4)});
  CHECK(normalize_min_zero(g) == g);

  FixtureRng rng(7);
  auto inst = fixture(18, {2, 3, 3});
  for (int t = 0; t < 10; ++t) {
    auto h = random_family(rng, inst.cost.shape(), -5, 5, 3);
    auto n = normalize_min_zero(h);
    CHECK(*std::min_element(n[0].begin(), n[0].end()) == 0);
    CHECK(eval_dual_value(n, inst.marginals) == eval_dual_value(h, inst.marginals));
    CHECK(slack_tensor(n, inst.cost).data() == slack_tensor(h, inst.cost).data());
  }
}

TEST_CASE("potential_bounds") {
  auto a = potential_bounds<Rational>(3, q(1));
  CHECK(a.lower == -7);
  CHECK(a.upper == 3);
  auto b = potential_bounds<Rational>(3, q(0));
  CHECK(b.lower == -2);
  CHECK(b.upper == 1);
  auto d = potential_bounds<Rational>(4, q(2));
  CHECK(d.lower == -17);
  CHECK(d.upper == 5);
  CHECK_THROWS_AS(potential_bounds<Rational>(2, q(1)), Error);
  PotentialFamily<Rational> f{{{q(-7), q(3)}, {q(0)}, {q(1)}}};
  CHECK(within_bounds(f, a));
  f[1][0] = q(31, 10);
  CHECK_FALSE(within_bounds(f, a));
}

TEST_CASE("is_conjugate_fixed_point") {
  auto inst = fixture(19, {2, 2, 3});
  auto zero = PotentialFamily<Rational>::zeros(inst.cost.shape());
  auto flags = is_conjugate_fixed_point(zero, inst.cost);
  CHECK(std::find(flags.begin(), flags.end(), false) != flags.end());

  auto c = CostTensor<Rational>::create(Shape({1, 1, 1}), {q(-4, 3)});
  PotentialFamily<Rational> f{{{q(-4, 3)}, {q(0)}, {q(0)}}};
  for (bool b : is_conjugate_fixed_point(f, c)) CHECK(b);
}

TEST_CASE("reference_point picks the first argmax on the support") {
  PotentialFamily<Rational> f{{{q(1), q(2)}, {q(0), q(1)}, {q(0), q(0)}}};
  std::vector<MultiIndex> support{{0, 1, 0}, {1, 0, 1}, {1, 0, 0}};
  CHECK(reference_point(f, support) == MultiIndex{0, 1, 0});
  f[2][1] = q(1, 2);
  CHECK(reference_point(f, support) == MultiIndex{1, 0, 1});
  CHECK_THROWS_AS(reference_point(f, {}), Error);
}

TEST_CASE("double mode conjugation agrees with exact mode") {
  auto exact = fixture(23, {3, 3, 3});
  auto approx = convert_instance<double>(exact);
  FixtureRng rng(23);
  auto f = admissible_random(rng, exact.cost);
  PotentialFamily<double> g;
  for (const auto& fk : f.potentials) {
    std::vector<double> v;
    for (const auto& x : fk) v.push_back(x.get_d());
    g.potentials.push_back(v);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    auto a = c_conjugate(f, k, exact.cost);
    auto b = c_conjugate(g, k, approx.cost);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i].get_d()));
  }
}
