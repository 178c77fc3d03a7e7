#include <gtest/gtest.h>

#include "support.hpp"

using namespace rabin;
using testing_support::corpus;

namespace {

std::vector<std::vector<std::string>> ec_names(const StochasticGame<Rational>& g, const std::vector<EndComponent>& ecs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& ec : ecs) out.push_back(g.names_of(ec.states));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Enumerate, Counts) {
  EXPECT_EQ(oracle::all_det_memoryless(corpus("fig3")).size(), 4u);
  EXPECT_EQ(oracle::all_det_memoryless(corpus("fig1")).size(), 2u);
  GameBuilder<Rational> b;
  b.system_state("x").initial("x").gamma(Rational(1, 2)).transition("x", "a", "x", 1, 0);
  EXPECT_EQ(oracle::all_det_memoryless(b.build()).size(), 1u);
}

TEST(Enumerate, LexicographicOrder) {
  auto g = corpus("fig3");
  auto all = oracle::all_det_memoryless(g);
  auto a = [&](const char* n) { return g.action_id(n); };
  EXPECT_EQ(all[0], deterministic_strategy(g, {a("a0"), a("a2")}));
  EXPECT_EQ(all[1], deterministic_strategy(g, {a("a0"), a("a3")}));
  EXPECT_EQ(all[3], deterministic_strategy(g, {a("a1"), a("a3")}));
}

TEST(Enumerate, Budget) {
  oracle::OracleBudget tight;
  tight.max_strategies = 3;
  EXPECT_THROW(oracle::all_det_memoryless(corpus("fig3"), tight), oracle::BudgetExceeded);
  EXPECT_THROW(oracle::oracle_exact_values(corpus("fig3"), tight), oracle::BudgetExceeded);
  tight.max_states = 1;
  EXPECT_THROW(oracle::enumerate_all_ecs(fix_system_strategy(corpus("fig1"), oracle::all_det_memoryless(corpus("fig1"))[0]), tight),
               oracle::BudgetExceeded);
}

TEST(AllEcs, Fig3EveryActionAllowed) {
  // Model both system states as environment states to leave all actions open.
  auto g = corpus("fig3");
  EnvMDP<Rational> mdp;
  mdp.system.assign(g.num_states(), false);
  mdp.choices.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s)
    for (const auto& c : g.choices(s)) mdp.choices[s].push_back(mdp_choice_of(c));
  EXPECT_EQ(ec_names(g, oracle::enumerate_all_ecs(mdp)),
            (std::vector<std::vector<std::string>>{{"s0"}, {"s0", "s1"}, {"s1"}}));
}

TEST(AllEcs, Fig1WithA2) {
  auto g = corpus("fig1");
  MemorylessStrategy<Rational> sigma(g.num_states());
  sigma.set_deterministic(g.state_id("q1"), g.action_id("a2"));
  EXPECT_EQ(ec_names(g, oracle::enumerate_all_ecs(fix_system_strategy(g, sigma))),
            (std::vector<std::vector<std::string>>{{"q0", "q1"}}));
}

TEST(AllEcs, SelfLoop) {
  GameBuilder<Rational> b;
  b.env_state("x").initial("x").gamma(Rational(1, 2)).transition("x", "a", "x", 1, 0);
  auto g = b.build();
  EXPECT_EQ(oracle::enumerate_all_ecs(fix_system_strategy(g, MemorylessStrategy<Rational>(1))).size(), 1u);
}

TEST(OracleRegion, Corpus) {
  auto g1 = corpus("fig1");
  EXPECT_EQ(oracle::oracle_as_region(g1), g1.all_states());
  auto g2 = corpus("fig2");
  EXPECT_EQ(g2.names_of(oracle::oracle_as_region(g2)), (std::vector<std::string>{"q0", "q2"}));
  GameBuilder<Rational> b;
  b.env_state("x").system_state("y").initial("x").gamma(Rational(1, 2));
  b.transition("x", "a", "x", 1, 0).transition("x", "b", "y", 1, 0).transition("y", "a", "y", 1, 0);
  b.rabin_pair({}, {"x"}).rabin_pair({}, {"y"});
  auto g = b.build();
  EXPECT_EQ(oracle::oracle_as_region(g), g.all_states());
}

TEST(OracleValues, Corpus) {
  auto v3 = oracle::oracle_exact_values(corpus("fig3"));
  EXPECT_EQ(v3.values, (std::vector<Rational>{2, 4}));
  auto g2 = corpus("fig2");
  EXPECT_EQ(oracle::oracle_exact_values(g2)[g2.state_id("q0")], 9);
  GameBuilder<Rational> b;
  b.env_state("x").system_state("y").initial("x").gamma(Rational(1, 2));
  b.transition("x", "a", "y", 1, 0).transition("y", "a", "x", 1, 0).transition("y", "b", "y", 1, 0);
  EXPECT_EQ(oracle::oracle_exact_values(b.build()).values, (std::vector<Rational>{0, 0}));
}

TEST(OracleAgreement, BadEcExistence) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 300; ++i) {
    auto g = testing_support::random_game(rng);
    auto sigma = testing_support::random_on_support(g, testing_support::random_support(g, rng), rng);
    auto mdp = fix_system_strategy(g, sigma);
    bool oracle_bad = false;
    for (const auto& ec : oracle::enumerate_all_ecs(mdp))
      oracle_bad = oracle_bad || !rabin_good(ec.states, g.rabin_pairs());
    auto found = find_bad_ec(mdp, g.rabin_pairs(), g.all_states());
    EXPECT_EQ(oracle_bad, found.has_value()) << "game " << i;
    if (found) {
      EXPECT_FALSE(rabin_good(found->states, g.rabin_pairs()));
    }
    auto win = oracle::oracle_winning_states(g, sigma);
    auto v = verify_almost_sure(g, sigma, g.all_states());
    EXPECT_EQ(win, v.per_state_winning) << "game " << i;
  }
}

TEST(OracleAgreement, FoundEcIsAnEndComponent) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 300; ++i) {
    auto g = testing_support::random_game(rng);
    auto sigma = testing_support::random_on_support(g, testing_support::random_support(g, rng), rng);
    auto mdp = fix_system_strategy(g, sigma);
    auto found = find_bad_ec(mdp, g.rabin_pairs(), g.all_states());
    if (!found) continue;
    bool listed = false;
    for (const auto& ec : oracle::enumerate_all_ecs(mdp)) listed = listed || ec.states == found->states;
    EXPECT_TRUE(listed) << "game " << i;
  }
}
