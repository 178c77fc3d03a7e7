#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabin/end_component.hpp"
#include "rabin/env_mdp.hpp"
#include "rabin/game.hpp"
#include "rabin/strategy.hpp"

namespace rabin {

/// The number of strategies to enumerate exceeds the configured bound.
class EnumerationLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No state is almost-sure winning although the caller required one.
class RegionEmptyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ASVerdict {
  bool winning = false;
  std::optional<EndComponent> bad_ec;  // reachable from a losing checked state
  std::vector<bool> per_state_winning;  // over all states of the checked game
};

template <class Num>
struct ASRegionResult {
  StateSet region;
  MemorylessStrategy<Num> witness;  // deterministic, winning from every region state
};

struct RegionOptions {
  std::uint64_t max_strategies = 1'000'000;
  bool require_nonempty = false;
};

/// States from which the environment cannot force a bad end component,
/// given the (already fixed) system behaviour in `mdp`.
template <class Num>
StateSet winning_states(const EnvMDP<Num>& mdp, const std::vector<RabinPair>& pairs) {
  StateSet bad(mdp.num_states());
  for (const auto& ec : bad_end_components(mdp, pairs, StateSet::full(mdp.num_states()))) bad |= ec.states;
  return StateSet::full(mdp.num_states()) - mdp_can_reach(mdp, bad);
}

template <class Num>
ASVerdict verify_almost_sure(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma,
                             const StateSet& check_states) {
  EnvMDP<Num> mdp = fix_system_strategy(g, sigma);
  StateSet win = winning_states(mdp, g.rabin_pairs());
  ASVerdict v;
  v.per_state_winning.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) v.per_state_winning[s] = win.contains(s);
  v.winning = check_states.is_subset_of(win);
  if (!v.winning) {
    for (StateId s : check_states.members()) {
      if (win.contains(s)) continue;
      v.bad_ec = find_bad_ec(mdp, g.rabin_pairs(), StateSet(g.num_states(), {s}));
      break;
    }
  }
  return v;
}

/// Finite-memory strategies are checked on the product with their memory;
/// verdicts refer to (s, m0). A bad end component is reported over product
/// states, so its ids index `product.game`.
template <class Num>
ASVerdict verify_almost_sure(const StochasticGame<Num>& g, const FiniteMemoryStrategy<Num>& sigma,
                             const StateSet& check_states) {
  ProductGame<Num> prod = product_with_memory(g, sigma);
  StateSet lifted(prod.game.num_states());
  for (StateId s : check_states.members()) lifted.insert(prod.at(s, sigma.initial_memory()));
  ASVerdict inner = verify_almost_sure(prod.game, prod.strategy, lifted);
  ASVerdict v;
  v.winning = inner.winning;
  v.bad_ec = std::move(inner.bad_ec);
  v.per_state_winning.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s)
    v.per_state_winning[s] = inner.per_state_winning[prod.at(s, sigma.initial_memory())];
  return v;
}

/// Number of deterministic memoryless system strategies, saturating at
/// `cap + 1`.
template <class Num>
std::uint64_t count_deterministic_strategies(const StochasticGame<Num>& g, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (!g.is_system(s)) continue;
    std::uint64_t k = g.choices(s).size();
    if (k == 0) return 0;
    if (total > (cap + 1) / k + 1) return cap + 1;
    total *= k;
    if (total > cap) return cap + 1;
  }
  return total;
}

/// Visits every deterministic memoryless system strategy in lexicographic
/// order of (state id, action id). `visit` returns false to stop early.
template <class Num, class Visit>
void for_each_deterministic_strategy(const StochasticGame<Num>& g, std::uint64_t max_strategies, Visit&& visit) {
  std::uint64_t count = count_deterministic_strategies(g, max_strategies);
  if (count > max_strategies)
    throw EnumerationLimitError("more than " + std::to_string(max_strategies) +
                                " deterministic memoryless strategies to enumerate");
  if (count == 0) return;
  std::vector<StateId> sys;
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) sys.push_back(s);
  std::vector<std::size_t> digit(sys.size(), 0);
  std::vector<ActionId> pick(g.num_states(), 0);
  for (;;) {
    for (std::size_t i = 0; i < sys.size(); ++i) pick[sys[i]] = g.choices(sys[i])[digit[i]].action;
    if (!visit(deterministic_strategy(g, pick))) return;
    // Last system state varies fastest.
    std::size_t i = sys.size();
    while (i > 0) {
      --i;
      if (++digit[i] < g.choices(sys[i]).size()) break;
      digit[i] = 0;
      if (i == 0) return;
    }
    if (sys.empty()) return;
  }
}

/// Almost-sure winning region by exhaustive search over deterministic
/// memoryless strategies, which suffice for Rabin objectives.
///
/// The witness takes, at each region state, the least action used by some
/// strategy winning there. If that assembly fails re-verification, the first
/// enumerated strategy winning on the whole region is returned instead (one
/// exists, as deterministic memoryless strategies can win uniformly).
template <class Num>
ASRegionResult<Num> almost_sure_region(const StochasticGame<Num>& g, const RegionOptions& opts = {}) {
  const std::size_t n = g.num_states();
  StateSet region(n);
  std::vector<std::optional<ActionId>> least(n);

  for_each_deterministic_strategy(g, opts.max_strategies, [&](const MemorylessStrategy<Num>& sigma) {
    StateSet win = winning_states(fix_system_strategy(g, sigma), g.rabin_pairs());
    for (StateId s : win.members()) {
      region.insert(s);
      if (g.is_system(s)) {
        ActionId a = sigma.at(s).front().first;
        if (!least[s] || a < *least[s]) least[s] = a;
      }
    }
    return true;
  });

  if (region.empty() && opts.require_nonempty) throw RegionEmptyError("almost-sure winning region is empty");

  MemorylessStrategy<Num> witness(n);
  for (StateId s = 0; s < n; ++s) {
    if (!g.is_system(s) || g.choices(s).empty()) continue;
    witness.set_deterministic(s, least[s] ? *least[s] : g.choices(s).front().action);
  }
  if (!region.empty() && !verify_almost_sure(g, witness, region).winning) {
    for_each_deterministic_strategy(g, opts.max_strategies, [&](const MemorylessStrategy<Num>& sigma) {
      if (!region.is_subset_of(winning_states(fix_system_strategy(g, sigma), g.rabin_pairs()))) return true;
      witness = sigma;
      return false;
    });
  }
  return {std::move(region), std::move(witness)};
}

}  // namespace rabin
