#include <doctest.h>

#include "fixtures.hpp"
#include "mot/core.hpp"

using namespace mot;
using namespace mot::testing;

TEST_CASE("DiscreteMeasure validation") {
  CHECK_NOTHROW(DiscreteMeasure<Rational>::create({q(1, 3), q(1, 3), q(1, 3)}));
  CHECK_THROWS_AS(DiscreteMeasure<Rational>::create({q(1, 2), q(1, 3)}), Error);
  CHECK_THROWS_AS(DiscreteMeasure<Rational>::create({q(3, 2), q(-1, 2)}), Error);
  CHECK_THROWS_AS(DiscreteMeasure<Rational>::create({q(1, 2), q(1, 2)}, {"a", "a"}), Error);
  CHECK_THROWS_AS(DiscreteMeasure<Rational>::create({}), Error);
  CHECK_NOTHROW(DiscreteMeasure<double>::create({0.1, 0.2, 0.7}));
  CHECK_THROWS_AS(DiscreteMeasure<double>::create({0.1, 0.2, 0.6}), Error);
  auto m = DiscreteMeasure<Rational>::create({q(1, 4), q(3, 4)});
  CHECK(m.atoms() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("CostTensor needs K >= 3 and finite entries") {
  CHECK_THROWS_AS(CostTensor<Rational>::create(Shape({2, 2}), std::vector<Rational>(4, 0)), Error);
  CHECK_THROWS_AS(CostTensor<double>::create(Shape({1, 1, 1}), {std::nan("")}), Error);
  auto c = CostTensor<Rational>::create(Shape({1, 2, 1}), {q(-3), q(2)});
  CHECK(c.sup_norm() == 3);
  CHECK(c.min_entry() == -3);
}

TEST_CASE("Coupling rejects negative mass and reports marginals") {
  CHECK_THROWS_AS(Coupling<Rational>(Tensor<Rational>(Shape({1, 1, 2}), {q(1), q(-1)})), Error);
  auto mu = uniform_marginals({2, 3, 2});
  auto pi = product_coupling(mu);
  CHECK(pi.total_mass() == 1);
  CHECK(pi.marginal(1) == mu[1].weights());
  CHECK(is_feasible(pi, mu));
  auto other = uniform_marginals({2, 3, 2});
  other[0] = DiscreteMeasure<Rational>::create({q(1, 3), q(2, 3)});
  CHECK_FALSE(is_feasible(pi, other));
  CHECK_THROWS_AS(require_feasible(pi, other), Error);
}

TEST_CASE("eval_primal_cost examples") {
  SUBCASE("Dirac marginals give the single entry") {
    auto mu = dirac_marginals(3);
    auto c = CostTensor<Rational>::create(Shape({1, 1, 1}), {q(17, 3)});
    CHECK(eval_primal_cost(product_coupling(mu), c) == q(17, 3));
  }
  SUBCASE("constant cost under the product measure") {
    auto mu = uniform_marginals({2, 3, 2});
    auto c = CostTensor<Rational>::create(Shape({2, 3, 2}), std::vector<Rational>(12, q(7)));
    CHECK(eval_primal_cost(product_coupling(mu), c) == 7);
  }
  SUBCASE("matches a nested-loop sum") {
    auto inst = fixture(11, {2, 2, 2});
    auto pi = product_coupling(inst.marginals);
    Rational oracle = 0;
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t a = 0; a < 2; ++a) {
          MultiIndex i{a, b, c};
          oracle += inst.cost.at(i) * inst.marginals[0].weight(a) * inst.marginals[1].weight(b) *
                    inst.marginals[2].weight(c);
        }
    CHECK(eval_primal_cost(pi, inst.cost) == oracle);
  }
  SUBCASE("shape mismatch") {
    auto mu = uniform_marginals({2, 2, 2});
    auto c = CostTensor<Rational>::create(Shape({2, 2, 3}), std::vector<Rational>(12, q(0)));
    CHECK_THROWS_AS(eval_primal_cost(product_coupling(mu), c), Error);
  }
}

TEST_CASE("eval_dual_value examples") {
  auto mu = uniform_marginals({2, 3, 2});
  Shape s({2, 3, 2});
  auto f = PotentialFamily<Rational>::zeros(s);
  CHECK(eval_dual_value(f, mu) == 0);
  f[0] = {q(1), q(2)};
  CHECK(eval_dual_value(f, mu) == q(3, 2));
  auto inst = fixture(5, {2, 3, 2});
  auto g = PotentialFamily<Rational>::zeros(s);
  g[0] = {-inst.cost.sup_norm(), -inst.cost.sup_norm()};
  CHECK(eval_dual_value(g, inst.marginals) == -inst.cost.sup_norm());
  g[1].pop_back();
  CHECK_THROWS_AS(eval_dual_value(g, inst.marginals), Error);
}

TEST_CASE("admissibility_slack examples") {
  auto inst = fixture(3, {2, 3, 2});
  auto c = shift_cost(inst.cost, inst.cost.sup_norm());
  auto f = PotentialFamily<Rational>::zeros(c.shape());
  CHECK(admissibility_slack(f, c).min_slack == c.min_entry());
  CHECK(c.min_entry() >= 0);

  auto g = PotentialFamily<Rational>::zeros(inst.cost.shape());
  g[0] = {-inst.cost.sup_norm(), -inst.cost.sup_norm()};
  CHECK(admissibility_slack(g, inst.cost).min_slack ==
        inst.cost.min_entry() + inst.cost.sup_norm());

  // Raise f_1 at atom 1 above the minimum of c over that slice.
  Rational row_min = inst.cost.at(MultiIndex{1, 0, 0});
  MultiIndex row_arg{1, 0, 0};
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t d = 0; d < 2; ++d) {
      MultiIndex i{1, b, d};
      if (inst.cost.at(i) < row_min) {
        row_min = inst.cost.at(i);
        row_arg = i;
      }
    }
  auto h = PotentialFamily<Rational>::zeros(inst.cost.shape());
  h[0] = {inst.cost.min_entry(), row_min + 1};
  auto slack = admissibility_slack(h, inst.cost);
  CHECK(slack.min_slack == -1);
  CHECK(slack.argmin == row_arg);
}

TEST_CASE("shift_cost examples") {
  auto inst = fixture(9, {2, 2, 3});
  auto same = shift_cost(inst.cost, Rational(0));
  CHECK(same.data() == inst.cost.data());
  auto pos = shift_cost(inst.cost, inst.cost.sup_norm());
  CHECK(pos.min_entry() >= 0);
  Rational expected = 0;
  for (const auto& x : pos.data()) expected = std::max(expected, Rational(abs(x)));
  CHECK(pos.sup_norm() == expected);
}

TEST_CASE("weak duality on fuzzed admissible families") {
  FixtureRng rng(77);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = fixture(seed, {2, 3, 2});
    auto f = random_family(rng, inst.cost.shape(), -5, 5);
    auto slack = admissibility_slack(f, inst.cost);
    f[0] = add_constants(f, {slack.min_slack, Rational(0), Rational(0)})[0];
    CHECK(admissibility_slack(f, inst.cost).min_slack == 0);
    auto pi = product_coupling(inst.marginals);
    CHECK(eval_dual_value(f, inst.marginals) <= eval_primal_cost(pi, inst.cost));
  }
}

TEST_CASE("zero-sum constants leave J and the slack unchanged") {
  FixtureRng rng(8);
  auto inst = fixture(21, {3, 2, 2});
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_family(rng, inst.cost.shape(), -3, 3);
    Rational a = rng.rational(-4, 4, 3), b = rng.rational(-4, 4, 5);
    auto g = add_constants(f, {a, b, -a - b});
    CHECK(eval_dual_value(g, inst.marginals) == eval_dual_value(f, inst.marginals));
    CHECK(slack_tensor(g, inst.cost).data() == slack_tensor(f, inst.cost).data());
    CHECK(admissibility_slack(g, inst.cost).min_slack ==
          admissibility_slack(f, inst.cost).min_slack);
  }
}
