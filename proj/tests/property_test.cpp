#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace rabin;

TEST(Property, EpsilonSynthesisIsWinningAndNearOptimal) {
  std::mt19937_64 rng(71);
  int solved = 0;
  for (int i = 0; i < 300; ++i) {
    auto g = testing_support::random_game(rng);
    Rational ceiling = g.max_reward() / (1 - g.gamma());
    Rational eps = ceiling > 0 ? Rational(ceiling / (i % 2 ? 8 : 2)) : Rational(1);
    SynthesisResult<Rational> r;
    try {
      r = solve_epsilon(g, eps);
    } catch (const PreconditionError&) {
      continue;
    }
    ++solved;
    ASSERT_NE(r.kind, ResultKind::none);
    ASSERT_TRUE(r.verdict && r.strategy_values);
    EXPECT_TRUE(r.verdict->winning) << "game " << i;
    for (StateId s : r.game.initial().members())
      EXPECT_GE(r.strategy_values->values[s], r.optimal_values.values[s] - eps) << "game " << i;
  }
  EXPECT_GT(solved, 100);
}

TEST(Property, OptimalSynthesisAttainsValuesEverywhere) {
  std::mt19937_64 rng(72);
  int optimal = 0;
  for (int i = 0; i < 300; ++i) {
    auto g = testing_support::random_game(rng);
    SynthesisResult<Rational> r;
    try {
      r = solve_optimal(g);
    } catch (const PreconditionError&) {
      continue;
    }
    if (r.kind == ResultKind::none) continue;
    ++optimal;
    EXPECT_TRUE(r.memoryless->is_deterministic());
    EXPECT_TRUE(r.verdict->winning);
    EXPECT_EQ(r.strategy_values->values, r.optimal_values.values) << "game " << i;
  }
  EXPECT_GT(optimal, 50);
}

TEST(Property, BudgetAndMemoryMonotoneInEpsilon) {
  const Rational gamma = testing_support::frac(4, 5), r_max = 3;
  Rational prev_p = 0;
  std::size_t prev_c = memory_bound(testing_support::frac(1, 100), gamma, r_max);
  for (int k = 1; k <= 60; ++k) {
    Rational eps = testing_support::frac(k, 4);
    Rational p = suboptimality_budget(eps, gamma, r_max);
    std::size_t c = memory_bound(eps, gamma, r_max);
    EXPECT_GE(p, prev_p);
    EXPECT_LE(p, 1);
    EXPECT_LE(c, prev_c);
    prev_p = p;
    prev_c = c;
  }
  EXPECT_EQ(prev_p, 1);
  EXPECT_EQ(prev_c, 0u);
}

TEST(Property, JsonRoundTripPreservesValues) {
  std::mt19937_64 rng(73);
  for (int i = 0; i < 100; ++i) {
    auto g = testing_support::random_game(rng);
    auto back = io::parse_game<Rational>(io::game_to_json(g).dump());
    EXPECT_EQ(solve_values(back, SolveMode::exact()).values, solve_values(g, SolveMode::exact()).values);
    EXPECT_EQ(almost_sure_region(back).region, almost_sure_region(g).region);
  }
}

TEST(Property, SimulationTracksStrategyValue) {
  std::mt19937_64 rng(74);
  for (int i = 0; i < 20; ++i) {
    auto g = convert_game<double>(testing_support::random_game(rng));
    MemorylessStrategy<double> sigma(g.num_states()), env_choice(g.num_states());
    for (StateId s = 0; s < g.num_states(); ++s) {
      const auto& cs = g.choices(s);
      ActionId a = cs[rng() % cs.size()].action;
      if (g.is_system(s)) {
        ActionId b = cs[rng() % cs.size()].action;
        if (a == b) sigma.set_deterministic(s, a);
        else sigma.set(s, {{a, 0.25}, {b, 0.75}});
      } else {
        env_choice.set_deterministic(s, a);
      }
    }
    // With the environment fixed to one action per state, the value is that of a chain.
    auto chain = filter_actions(g, [&](StateId s, ActionId a) {
      return g.is_system(s) || env_choice.at(s).front().first == a;
    });
    double expected = strategy_value(chain, sigma, SolveMode::exact())[0];
    EnvPolicy<double> env;
    env.kind = EnvPolicyKind::given;
    env.strategy = env_choice;
    const std::size_t runs = 4000;
    auto stats = simulate<double>(g, sigma, env, 0, 150, 1000 + i, runs);
    double ceiling = g.max_reward() / (1 - g.gamma());
    EXPECT_NEAR(stats.mean_return, expected, stats.truncation_bound + 5 * ceiling / std::sqrt(double(runs))) << i;
  }
}
