#pragma once

#include <limits>
#include <map>
#include <vector>

#include "rabin/game.hpp"
#include "rabin/strategy.hpp"

namespace rabin {

/// Marks the single collapsed choice of a system state in an EnvMDP.
inline constexpr ActionId kMixedAction = std::numeric_limits<ActionId>::max();

template <class Num>
struct MdpChoice {
  ActionId action;                               // kMixedAction at system states
  std::vector<std::pair<StateId, Num>> successors;  // positive entries, by id
  Num reward;                                    // expected immediate reward
};

/// Decision process left for the environment once the system strategy is
/// fixed. Environment states keep their actions; each system state has one
/// choice, the strategy's mixture of its action distributions.
template <class Num>
struct EnvMDP {
  std::vector<bool> system;
  std::vector<std::vector<MdpChoice<Num>>> choices;

  std::size_t num_states() const { return choices.size(); }
};

template <class Num>
MdpChoice<Num> mdp_choice_of(const Choice<Num>& c) {
  MdpChoice<Num> out{c.action, {}, NumTraits<Num>::zero()};
  for (const auto& t : c.outcomes) {
    if (!(t.prob > 0)) continue;
    out.successors.emplace_back(t.to, t.prob);
    out.reward += t.prob * t.reward;
  }
  return out;
}

template <class Num>
EnvMDP<Num> fix_system_strategy(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma) {
  EnvMDP<Num> mdp;
  mdp.system.resize(g.num_states());
  mdp.choices.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    mdp.system[s] = g.is_system(s);
    if (g.is_environment(s)) {
      for (const auto& c : g.choices(s)) mdp.choices[s].push_back(mdp_choice_of(c));
      continue;
    }
    std::map<StateId, Num> mix;
    Num reward = NumTraits<Num>::zero();
    for (const auto& [a, w] : sigma.at(s)) {
      const Choice<Num>* c = g.find_choice(s, a);
      if (c == nullptr) continue;
      for (const auto& t : c->outcomes) {
        Num mass = w * t.prob;
        auto [it, fresh] = mix.emplace(t.to, mass);
        if (!fresh) it->second += mass;
        reward += mass * t.reward;
      }
    }
    MdpChoice<Num> mixed{kMixedAction, {}, reward};
    for (auto& [to, p] : mix)
      if (p > 0) mixed.successors.emplace_back(to, p);
    mdp.choices[s].push_back(std::move(mixed));
  }
  return mdp;
}

}  // namespace rabin
