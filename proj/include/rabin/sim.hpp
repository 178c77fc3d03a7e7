#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rabin/game.hpp"
#include "rabin/quantitative.hpp"
#include "rabin/strategy.hpp"

namespace rabin {

enum class EnvPolicyKind { best_response, uniform, given };

/// How the environment moves during simulation. `given` reads a memoryless
/// strategy defined at environment states.
template <class Num>
struct EnvPolicy {
  EnvPolicyKind kind = EnvPolicyKind::best_response;
  MemorylessStrategy<Num> strategy;
};

struct RunSample {
  std::vector<std::pair<StateId, ActionId>> trace;  // (s_t, a_{t+1})
  double truncated_return = 0.0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
};

struct SimulationStats {
  double mean_return = 0.0;
  double truncation_bound = 0.0;  // gamma^H * Rmax / (1 - gamma)
  std::size_t runs = 0;
  std::size_t horizon = 0;
  std::vector<std::uint64_t> visits;                      // per state
  std::vector<std::vector<std::uint64_t>> action_counts;  // per state, per action id
};

template <class Num>
using SystemStrategy = std::variant<MemorylessStrategy<Num>, FiniteMemoryStrategy<Num>>;

namespace detail {

template <class Num>
std::size_t sample_index(const std::vector<Num>& weights, std::mt19937_64& rng) {
  std::vector<double> w;
  for (const auto& x : weights) w.push_back(NumTraits<Num>::to_double(x));
  std::discrete_distribution<std::size_t> d(w.begin(), w.end());
  return d(rng);
}

/// Simulates on a game whose system strategy is memoryless; finite-memory
/// strategies are first lifted to their product.
template <class Num>
class Simulator {
public:
  Simulator(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma, const EnvPolicy<Num>& env)
      : g_(g), sigma_(sigma), env_(env) {
    if (env.kind == EnvPolicyKind::best_response) {
      MdpSolution<Num> sol = solve_env_mdp(fix_system_strategy(g, sigma), g.gamma(), SolveMode::exact());
      best_.resize(g.num_states());
      for (StateId s = 0; s < g.num_states(); ++s)
        if (g.is_environment(s)) best_[s] = g.choices(s)[sol.choice[s]].action;
    }
  }

  RunSample run(StateId s0, std::size_t horizon, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    RunSample out;
    out.horizon = horizon;
    out.seed = seed;
    const double gamma = NumTraits<Num>::to_double(g_.gamma());
    double discount = 1.0;
    StateId s = s0;
    for (std::size_t t = 0; t < horizon; ++t) {
      ActionId a = pick(s, rng);
      const Choice<Num>* c = g_.find_choice(s, a);
      std::vector<Num> w;
      for (const auto& tr : c->outcomes) w.push_back(tr.prob);
      const auto& tr = c->outcomes[sample_index(w, rng)];
      out.trace.emplace_back(s, a);
      out.truncated_return += discount * NumTraits<Num>::to_double(tr.reward);
      discount *= gamma;
      s = tr.to;
    }
    return out;
  }

private:
  ActionId pick(StateId s, std::mt19937_64& rng) const {
    if (g_.is_system(s)) {
      const auto& d = sigma_.at(s);
      std::vector<Num> w;
      for (const auto& [a, p] : d) w.push_back(p);
      return d[sample_index(w, rng)].first;
    }
    switch (env_.kind) {
      case EnvPolicyKind::best_response: return best_[s];
      case EnvPolicyKind::uniform: {
        std::uniform_int_distribution<std::size_t> u(0, g_.choices(s).size() - 1);
        return g_.choices(s)[u(rng)].action;
      }
      case EnvPolicyKind::given: {
        const auto& d = env_.strategy.at(s);
        if (d.empty()) throw std::invalid_argument("environment strategy undefined at '" + g_.state_name(s) + "'");
        std::vector<Num> w;
        for (const auto& [a, p] : d) w.push_back(p);
        return d[sample_index(w, rng)].first;
      }
    }
    return g_.choices(s).front().action;
  }

  const StochasticGame<Num>& g_;
  const MemorylessStrategy<Num>& sigma_;
  const EnvPolicy<Num>& env_;
  std::vector<ActionId> best_;
};

}  // namespace detail

/// Monte-Carlo estimate of the truncated discounted return from `s0`.
/// Run i uses seed + i, so results are reproducible and independent of
/// execution order.
template <class Num>
SimulationStats simulate(const StochasticGame<Num>& g, const SystemStrategy<Num>& sigma, const EnvPolicy<Num>& env,
                         StateId s0, std::size_t horizon, std::uint64_t seed, std::size_t runs) {
  if (horizon < 1 || runs < 1) throw std::invalid_argument("horizon and run count must be positive");
  SimulationStats stats;
  stats.runs = runs;
  stats.horizon = horizon;
  stats.visits.assign(g.num_states(), 0);
  stats.action_counts.assign(g.num_states(), std::vector<std::uint64_t>(g.num_actions(), 0));
  const double gamma = NumTraits<Num>::to_double(g.gamma());
  stats.truncation_bound = std::pow(gamma, static_cast<double>(horizon)) *
                           NumTraits<Num>::to_double(g.max_reward()) / (1.0 - gamma);

  auto accumulate = [&](const RunSample& r, const auto& base_of) {
    stats.mean_return += r.truncated_return;
    for (const auto& [s, a] : r.trace) {
      StateId b = base_of(s);
      ++stats.visits[b];
      ++stats.action_counts[b][a];
    }
  };

  if (const auto* m = std::get_if<MemorylessStrategy<Num>>(&sigma)) {
    detail::Simulator<Num> sim(g, *m, env);
    for (std::size_t i = 0; i < runs; ++i) accumulate(sim.run(s0, horizon, seed + i), [](StateId s) { return s; });
  } else {
    const auto& fm = std::get<FiniteMemoryStrategy<Num>>(sigma);
    ProductGame<Num> prod = product_with_memory(g, fm);
    std::vector<StateId> base(prod.game.num_states());
    for (StateId s = 0; s < g.num_states(); ++s)
      for (std::size_t m = 0; m < fm.memory_size(); ++m) base[prod.at(s, m)] = s;
    EnvPolicy<Num> lifted = env;
    if (env.kind == EnvPolicyKind::given) {
      lifted.strategy = MemorylessStrategy<Num>(prod.game.num_states());
      for (StateId q = 0; q < prod.game.num_states(); ++q) lifted.strategy.set(q, env.strategy.at(base[q]));
    }
    detail::Simulator<Num> sim(prod.game, prod.strategy, lifted);
    StateId start = prod.at(s0, fm.initial_memory());
    for (std::size_t i = 0; i < runs; ++i)
      accumulate(sim.run(start, horizon, seed + i), [&](StateId s) { return base[s]; });
  }
  stats.mean_return /= static_cast<double>(runs);
  return stats;
}

}  // namespace rabin
