#include "common.hpp"
#include "sspbound/oracle/policy.hpp"
#include "sspbound/oracle/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace sspbound;
using namespace sspbound::oracle;
using testutil::corpus;
using testutil::model_of;

namespace {

const char* kZeroReward = "var x = 3; while x >= 1 do { x := x - 1; } [] { x := x - 2; } od";

SimOptions trials(std::size_t n, std::uint64_t seed = 1) {
  SimOptions o;
  o.trials = n;
  o.seed = seed;
  return o;
}

void expect_within(const SimEstimate& e, double exact, double sigmas = 3) {
  ASSERT_TRUE(e.stderr_);
  EXPECT_LE(std::abs(e.mean - exact), sigmas * *e.stderr_) << "mean " << e.mean << " stderr " << *e.stderr_;
}

}  // namespace

TEST(Rng, CounterStream) {
  EXPECT_EQ(counter_bits(1, 2, 3, 4), counter_bits(1, 2, 3, 4));
  EXPECT_NE(counter_bits(1, 2, 3, 4), counter_bits(1, 2, 3, 5));
  EXPECT_NE(counter_bits(1, 2, 3, 4), counter_bits(1, 2, 4, 4));
  EXPECT_NE(counter_bits(1, 2, 3, 4), counter_bits(1, 3, 3, 4));
  EXPECT_NE(counter_bits(1, 2, 3, 4), counter_bits(2, 2, 3, 4));
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const double u = counter_uniform(7, t, t % 13, t % 3);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12, 0.002);
}

TEST(TreeSum, MatchesNaiveSum) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(tree_sum(v.data(), v.size()), 500500.0);
  EXPECT_EQ(tree_sum(v.data(), 0), 0.0);
  EXPECT_EQ(tree_sum(v.data(), 1), 1.0);
}

TEST(Simulate, GamblerFixedPolicies) {
  auto m = corpus("gambler");
  auto e1 = simulate(m, Policy::always(0), trials(20000));
  expect_within(e1, 10);
  EXPECT_NEAR(e1.mean_steps, 25, 1);
  EXPECT_FALSE(e1.unreliable);
  EXPECT_EQ(e1.truncated_fraction, 0);
  expect_within(simulate(m, Policy::always(1), trials(20000)), 3.75);
}

TEST(Simulate, InitOutsideGuardIsZero) {
  SimOptions o = trials(100);
  o.init = std::vector<Rational>{Rational(0)};
  auto e = simulate(corpus("gambler"), Policy::always(0), o);
  EXPECT_EQ(e.mean, 0);
  EXPECT_EQ(e.mean_steps, 0);
  EXPECT_EQ(*e.stderr_, 0);
}

TEST(Simulate, SingleTrialHasNoStderr) {
  auto e = simulate(corpus("gambler"), Policy::always(0), trials(1));
  EXPECT_FALSE(e.stderr_);
  EXPECT_EQ(e.trials, 1u);
}

TEST(Simulate, ReproducibleAcrossThreadCounts) {
  auto m = corpus("mini_roulette");
  SimOptions o = trials(5000, 42);
  auto one = simulate(m, Policy::uniform(), o);
  o.threads = 4;
  auto four = simulate(m, Policy::uniform(), o);
  EXPECT_EQ(one, four);
  o.seed = 43;
  EXPECT_NE(simulate(m, Policy::uniform(), o).mean, one.mean);
}

TEST(Simulate, StepCapDoublingIsStable) {
  auto m = corpus("gambler");
  SimOptions o = trials(20000, 3);
  o.step_cap = 2000;
  auto a = simulate(m, Policy::always(0), o);
  o.step_cap = 4000;
  auto b = simulate(m, Policy::always(0), o);
  EXPECT_LT(std::abs(a.mean - b.mean), *a.stderr_);
}

TEST(Simulate, HeavyTruncationIsUnreliable) {
  SimOptions o = trials(1000);
  o.step_cap = 5;
  auto e = simulate(corpus("gambler"), Policy::always(0), o);
  EXPECT_GT(e.truncated_fraction, kUnreliableTruncation);
  EXPECT_TRUE(e.unreliable);
}

TEST(Simulate, UniformDistribution) {
  // ten steps, each paying r with mean 1
  auto m = model_of("var x = 10; dist r ~ uniform(0, 2); while x >= 1 do { x := x - 1; reward r; } od");
  auto e = simulate(m, Policy::always(0), trials(20000));
  expect_within(e, 10);
  EXPECT_NEAR(*e.stderr_, std::sqrt(10.0 / 3 / 20000), 2e-3);
}

TEST(Simulate, UnreadDistributionsDoNotShiftTheStream) {
  auto a = model_of("var x = 4; dist r ~ discrete { 1: 0.5, 3: 0.5 }; while x >= 1 do { x := x - r; reward 1; } od");
  auto b = model_of(
      "var x = 4; dist r ~ discrete { 1: 0.5, 3: 0.5 }; dist s ~ discrete { 0: 0.5, 1: 0.5 }; "
      "while x >= 1 do { x := x - r; reward 1; } "
      "[] { x := x - s; } od");
  EXPECT_EQ(simulate(a, Policy::always(0), trials(3000)), simulate(b, Policy::always(0), trials(3000)));
}

TEST(Policy, Names) {
  EXPECT_EQ(Policy::always(2).name(), "always(3)");
  EXPECT_EQ(Policy::uniform().name(), "uniform");
  EXPECT_ANY_THROW(simulate(corpus("gambler"), Policy::always(5), trials(10)));
}

TEST(ValueIteration, Gambler) {
  auto m = corpus("gambler");
  auto sup = value_iteration(m, Box{{0}, {400}}, Objective::Sup);
  EXPECT_TRUE(sup.converged);
  const double vs = *sup.value_at({5});
  EXPECT_GE(vs, 9.9);
  EXPECT_LE(vs, 10.1);
  EXPECT_EQ(sup.policy[*sup.index({5})], 0u);
  auto inf = value_iteration(m, Box{{0}, {400}}, Objective::Inf);
  const double vi = *inf.value_at({5});
  EXPECT_GE(vi, 3.70);
  EXPECT_LE(vi, 3.80);
  EXPECT_EQ(inf.policy[*inf.index({5})], 1u);
  EXPECT_EQ(*sup.value_at({0}), 0);
  EXPECT_FALSE(sup.value_at({401}));
}

TEST(ValueIteration, BoundaryFunction) {
  // with the exact linear value outside the box a tiny box is enough
  ValueIterationOptions o;
  o.boundary = [](const std::vector<double>& x) { return 2 * x[0]; };
  auto t = value_iteration(corpus("gambler"), Box{{0}, {20}}, Objective::Sup, o);
  EXPECT_NEAR(*t.value_at({5}), 10, 1e-4);
  EXPECT_TRUE(t.warnings.empty());
  auto bare = value_iteration(corpus("gambler"), Box{{0}, {20}}, Objective::Sup);
  ASSERT_FALSE(bare.warnings.empty());
  EXPECT_LT(*bare.value_at({5}), 10);
}

TEST(ValueIteration, ZeroRewardModel) {
  auto t = value_iteration(model_of(kZeroReward), Box{{0}, {10}}, Objective::Sup);
  for (double v : t.values) EXPECT_EQ(v, 0);
}

TEST(ValueIteration, RejectsNonLatticeModels) {
  EXPECT_THROW(require_lattice(model_of("var x = 1; dist r ~ uniform(0, 1); while x >= 0 do { x := x - r; } od")),
               UnsupportedModel);
  EXPECT_THROW(require_lattice(model_of("var x = 1; while x >= 0 do { x := x - 0.5; } od")), UnsupportedModel);
  EXPECT_NO_THROW(require_lattice(corpus("robot2d")));
}

TEST(Properties, GreedyDominatesFixedPolicies) {
  auto m = corpus("gambler");
  auto table = std::make_shared<const ValueTable>(value_iteration(m, Box{{0}, {400}}, Objective::Sup));
  const auto g = simulate(m, Policy::greedy(table), trials(20000, 9));
  for (auto p : {Policy::always(0), Policy::always(1), Policy::uniform()}) {
    const auto e = simulate(m, p, trials(20000, 9));
    EXPECT_GE(g.mean, e.mean - 3 * std::hypot(*g.stderr_, *e.stderr_)) << p.name();
  }
}

TEST(Properties, MonteCarloMatchesValueIteration) {
  auto m = corpus("mini_roulette");
  auto table = value_iteration(m, Box{{0}, {1000}}, Objective::Inf);
  auto inf_table = std::make_shared<const ValueTable>(table);
  expect_within(simulate(m, Policy::greedy(inf_table), trials(20000, 4)), *table.value_at({10}), 4);
}
