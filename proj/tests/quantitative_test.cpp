#include <gtest/gtest.h>

#include "support.hpp"

using namespace rabin;
using testing_support::corpus;

namespace {

Rational q(const char* s) { return parse_number<Rational>(s); }

ValueFunction<Rational> zero(const StochasticGame<Rational>& g) {
  return {std::vector<Rational>(g.num_states(), Rational(0)), Rational(0)};
}

}  // namespace

TEST(Backup, Fig3FromZero) {
  auto g = corpus("fig3");
  auto v = bellman_backup(g, zero(g));
  EXPECT_EQ(v[g.state_id("s1")], 2);
  EXPECT_EQ(v[g.state_id("s0")], 0);
}

TEST(Backup, Fig2FromZero) {
  auto g = corpus("fig2");
  auto v = bellman_backup(g, zero(g));
  EXPECT_EQ(v.values, (std::vector<Rational>{0, 1, 0}));
}

TEST(Backup, FixpointOfExactValues) {
  for (const char* name : {"fig1", "fig2", "fig3"}) {
    auto g = corpus(name);
    auto v = solve_values(g, SolveMode::exact());
    EXPECT_EQ(bellman_backup(g, v).values, v.values) << name;
  }
}

TEST(Backup, Contraction) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    auto g = testing_support::random_game(rng);
    ValueFunction<Rational> a = zero(g), b = zero(g);
    for (StateId s = 0; s < g.num_states(); ++s) {
      a.values[s] = testing_support::frac(static_cast<long>(rng() % 50), 7);
      b.values[s] = testing_support::frac(static_cast<long>(rng() % 50), 3);
    }
    Rational before = detail::sup_distance(a.values, b.values);
    Rational after = detail::sup_distance(bellman_backup(g, a).values, bellman_backup(g, b).values);
    EXPECT_LE(after, g.gamma() * before);
  }
}

TEST(Solve, Fig3Exact) {
  auto g = corpus("fig3");
  auto v = solve_values(g, SolveMode::exact());
  EXPECT_EQ(v[g.state_id("s0")], 2);
  EXPECT_EQ(v[g.state_id("s1")], 4);
  EXPECT_EQ(v.error_bound, 0);
}

TEST(Solve, Fig2Exact) {
  auto v = solve_values(corpus("fig2"), SolveMode::exact());
  EXPECT_EQ(v.values, (std::vector<Rational>{9, 10, 0}));
}

TEST(Solve, Fig1Exact) {
  auto v = solve_values(corpus("fig1"), SolveMode::exact());
  EXPECT_EQ(v.values, (std::vector<Rational>{q("90/1009"), 10}));
}

TEST(Solve, GammaOverrideChangesValues) {
  auto g = io::load_game<Rational>(testing_support::game_path("fig2.json"), q("1/2"));
  EXPECT_EQ(solve_values(g, SolveMode::exact())[g.state_id("q0")], 1);
}

TEST(Solve, IterativeWithinBoundOfExact) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 200; ++i) {
    auto g = testing_support::random_game(rng);
    auto exact = solve_values(g, SolveMode::exact());
    auto gd = convert_game<double>(g);
    auto vi = solve_values(gd, SolveMode::iterative(1e-8));
    EXPECT_LE(vi.error_bound, 1e-8);
    for (StateId s = 0; s < g.num_states(); ++s)
      EXPECT_LE(std::abs(vi.values[s] - exact.values[s].get_d()), vi.error_bound + 1e-12);
    auto pi = solve_values(gd, SolveMode::exact());
    for (StateId s = 0; s < g.num_states(); ++s) EXPECT_NEAR(pi.values[s], exact.values[s].get_d(), 1e-9);
  }
}

TEST(Solve, ValueRange) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 200; ++i) {
    auto g = testing_support::random_game(rng);
    auto v = solve_values(g, SolveMode::exact());
    Rational ceiling = g.max_reward() / (1 - g.gamma());
    for (const auto& x : v.values) {
      EXPECT_GE(x, 0);
      EXPECT_LE(x, ceiling);
    }
  }
}

TEST(QValue, Fig3) {
  auto g = corpus("fig3");
  auto v = solve_values(g, SolveMode::exact());
  StateId s1 = g.state_id("s1");
  EXPECT_EQ(q_value(g, v, s1, g.action_id("a2")), 4);
  EXPECT_EQ(q_value(g, v, s1, g.action_id("a3")), 1);
  EXPECT_THROW(q_value(g, v, s1, g.action_id("a0")), std::invalid_argument);
}

TEST(QValue, ZeroRewardZeroValue) {
  GameBuilder<Rational> b;
  b.system_state("x").initial("x").gamma(q("9/10")).transition("x", "a", "x", 1, 0);
  auto g = b.build();
  EXPECT_EQ(q_value(g, zero(g), 0, 0), 0);
  EXPECT_EQ(solve_values(g, SolveMode::exact()).values, std::vector<Rational>{0});
}

TEST(OptimalActions, Corpus) {
  auto g3 = corpus("fig3");
  auto a3 = optimal_action_sets(g3, solve_values(g3, SolveMode::exact()));
  EXPECT_EQ(a3.at(g3.state_id("s0")), std::vector<ActionId>{g3.action_id("a1")});
  EXPECT_EQ(a3.at(g3.state_id("s1")), std::vector<ActionId>{g3.action_id("a2")});
  EXPECT_EQ(a3.tolerance, 0);

  auto g1 = corpus("fig1");
  auto a1 = optimal_action_sets(g1, solve_values(g1, SolveMode::exact()));
  EXPECT_EQ(a1.at(g1.state_id("q1")), std::vector<ActionId>{g1.action_id("a1")});
  EXPECT_TRUE(a1.at(g1.state_id("q0")).empty());

  auto g2 = corpus("fig2");
  auto a2 = optimal_action_sets(g2, solve_values(g2, SolveMode::exact()));
  EXPECT_EQ(a2.at(g2.state_id("q1")), std::vector<ActionId>{g2.action_id("a2")});
}

TEST(OptimalActions, FloatingToleranceMatchesExactOnCorpus) {
  for (const char* name : {"fig1", "fig2", "fig3"}) {
    auto g = corpus(name);
    auto gd = corpus<double>(name);
    auto exact = optimal_action_sets(g, solve_values(g, SolveMode::exact()));
    auto vi = solve_values(gd, SolveMode::iterative(1e-10));
    auto approx = optimal_action_sets(gd, vi);
    EXPECT_DOUBLE_EQ(approx.tolerance, 10 * vi.error_bound);
    EXPECT_EQ(approx.sets, exact.sets) << name;
  }
}

TEST(StrategyValue, Corpus) {
  auto g3 = corpus("fig3");
  auto s3 = deterministic_strategy(g3, {g3.action_id("a0"), g3.action_id("a3")});
  EXPECT_EQ(strategy_value(g3, s3, SolveMode::exact()).values, (std::vector<Rational>{0, 0}));

  auto g2 = corpus("fig2");
  auto s2 = deterministic_strategy(g2, {g2.action_id("a0"), g2.action_id("a2"), g2.action_id("a3")});
  EXPECT_EQ(strategy_value(g2, s2, SolveMode::exact())[g2.state_id("q0")], 9);

  // V(q1) = (1-x)(1 + g V(q1)) + x g V(q0),  V(q0) = g (0.999 V(q0) + 0.001 V(q1)).
  auto g1 = corpus("fig1");
  Rational x = q("1/1000"), gm = g1.gamma();
  MemorylessStrategy<Rational> s1(g1.num_states());
  s1.set(g1.state_id("q1"), {{g1.action_id("a1"), Rational(1 - x)}, {g1.action_id("a2"), x}});
  auto v = strategy_value(g1, s1, SolveMode::exact());
  Rational v0 = v[g1.state_id("q0")], v1 = v[g1.state_id("q1")];
  EXPECT_EQ(v1, (1 - x) * (1 + gm * v1) + x * gm * v0);
  EXPECT_EQ(v0, gm * (q("999/1000") * v0 + q("1/1000") * v1));
}

TEST(StrategyValue, OptimalIffSupportedInOptimalActions) {
  std::mt19937_64 rng(34);
  int suboptimal_seen = 0;
  for (int i = 0; i < 200; ++i) {
    auto g = testing_support::random_game(rng);
    auto v = solve_values(g, SolveMode::exact());
    auto astar = optimal_action_sets(g, v);
    auto support = testing_support::random_support(g, rng);
    bool inside = true;
    for (StateId s = 0; s < g.num_states(); ++s)
      for (ActionId a : support[s]) inside = inside && astar.contains(s, a);
    auto sv = strategy_value(g, testing_support::random_on_support(g, support, rng), SolveMode::exact());
    for (StateId s = 0; s < g.num_states(); ++s) EXPECT_LE(sv.values[s], v.values[s]);
    if (inside) {
      EXPECT_EQ(sv.values, v.values) << "game " << i;
    } else {
      // A suboptimal action with positive mass costs value at its state.
      bool drop = false;
      for (StateId s = 0; s < g.num_states(); ++s)
        for (ActionId a : support[s])
          if (!astar.contains(s, a)) drop = drop || sv.values[s] < v.values[s];
      EXPECT_TRUE(drop) << "game " << i;
      ++suboptimal_seen;
    }
  }
  EXPECT_GT(suboptimal_seen, 20);
}

TEST(StrategyValue, FiniteMemoryReportedAtInitialMemory) {
  auto g = corpus("fig3");
  auto winning = deterministic_strategy(g, {g.action_id("a0"), g.action_id("a3")});
  auto greedy = deterministic_strategy(g, {g.action_id("a1"), g.action_id("a2")});
  FiniteMemoryStrategy<Rational> fm(g.num_states(), 2, 0);
  for (StateId s = 0; s < g.num_states(); ++s) {
    fm.set_update(s, 0, 1);
    fm.set_update(s, 1, 1);
    fm.set(s, 0, greedy.at(s));
    fm.set(s, 1, winning.at(s));
  }
  // s0 -a1-> s1 -a3-> s0 ...: only the first step is greedy, reward 0.
  // s1 plays a2 once (reward 2) then a3 forever.
  EXPECT_EQ(strategy_value(g, fm, SolveMode::exact()).values, (std::vector<Rational>{0, 2}));
}

TEST(EnvMdpSolve, IterativeAndExactAgree) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 100; ++i) {
    auto g = testing_support::random_game(rng);
    auto sigma = testing_support::random_on_support(g, testing_support::random_support(g, rng), rng);
    auto mdp = fix_system_strategy(g, sigma);
    auto exact = solve_env_mdp(mdp, g.gamma(), SolveMode::exact());
    std::vector<Rational> residuals;
    auto it = solve_env_mdp(mdp, g.gamma(), SolveMode::iterative(1e-6), &residuals);
    EXPECT_LE(detail::sup_distance(it.value.values, exact.value.values), it.value.error_bound);
    for (std::size_t k = 1; k < residuals.size(); ++k) EXPECT_LE(residuals[k], g.gamma() * residuals[k - 1]);
  }
}
