#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "rabin/game.hpp"

namespace rabin {

/// Probability distribution over actions, ordered by action id, positive
/// entries only.
template <class Num>
using ActionDistribution = std::vector<std::pair<ActionId, Num>>;

/// Randomized memoryless system strategy. Environment states carry an empty
/// distribution.
template <class Num>
class MemorylessStrategy {
public:
  MemorylessStrategy() = default;
  explicit MemorylessStrategy(std::size_t num_states) : choice_(num_states) {}

  std::size_t num_states() const { return choice_.size(); }
  const ActionDistribution<Num>& at(StateId s) const { return choice_.at(s); }

  void set(StateId s, ActionDistribution<Num> dist) {
    std::erase_if(dist, [](const auto& e) { return !(e.second > 0); });
    std::sort(dist.begin(), dist.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    choice_.at(s) = std::move(dist);
  }
  void set_deterministic(StateId s, ActionId a) { choice_.at(s) = {{a, NumTraits<Num>::one()}}; }

  Num prob(StateId s, ActionId a) const {
    for (const auto& [b, p] : choice_.at(s))
      if (b == a) return p;
    return NumTraits<Num>::zero();
  }

  /// A_sigma(s): actions played with positive probability.
  std::vector<ActionId> support(StateId s) const {
    std::vector<ActionId> out;
    for (const auto& [a, p] : choice_.at(s)) out.push_back(a);
    return out;
  }

  bool is_deterministic() const {
    return std::all_of(choice_.begin(), choice_.end(), [](const auto& d) { return d.size() <= 1; });
  }

  friend bool operator==(const MemorylessStrategy& a, const MemorylessStrategy& b) { return a.choice_ == b.choice_; }

private:
  std::vector<ActionDistribution<Num>> choice_;
};

/// Deterministic strategy from one action per state (ignored at env states).
template <class Num>
MemorylessStrategy<Num> deterministic_strategy(const StochasticGame<Num>& g, const std::vector<ActionId>& pick) {
  MemorylessStrategy<Num> s(g.num_states());
  for (StateId q = 0; q < g.num_states(); ++q)
    if (g.is_system(q)) s.set_deterministic(q, pick.at(q));
  return s;
}

/// Randomized system strategy with a finite memory automaton.
///
/// Memory states are 0..memory_size()-1. The action at step i is drawn from
/// choice(s_i, m_i); afterwards m_{i+1} = update(s_i, m_i).
template <class Num>
class FiniteMemoryStrategy {
public:
  FiniteMemoryStrategy() = default;
  FiniteMemoryStrategy(std::size_t num_states, std::size_t memory_size, std::size_t initial = 0)
      : num_states_(num_states),
        memory_size_(memory_size),
        initial_(initial),
        update_(num_states * memory_size, 0),
        choice_(num_states * memory_size) {}

  std::size_t num_states() const { return num_states_; }
  std::size_t memory_size() const { return memory_size_; }
  std::size_t initial_memory() const { return initial_; }

  std::size_t update(StateId s, std::size_t m) const { return update_.at(index(s, m)); }
  void set_update(StateId s, std::size_t m, std::size_t next) { update_.at(index(s, m)) = next; }

  const ActionDistribution<Num>& at(StateId s, std::size_t m) const { return choice_.at(index(s, m)); }
  void set(StateId s, std::size_t m, ActionDistribution<Num> dist) {
    std::erase_if(dist, [](const auto& e) { return !(e.second > 0); });
    std::sort(dist.begin(), dist.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    choice_.at(index(s, m)) = std::move(dist);
  }

  friend bool operator==(const FiniteMemoryStrategy& a, const FiniteMemoryStrategy& b) {
    return a.num_states_ == b.num_states_ && a.memory_size_ == b.memory_size_ && a.initial_ == b.initial_ &&
           a.update_ == b.update_ && a.choice_ == b.choice_;
  }

private:
  std::size_t index(StateId s, std::size_t m) const { return s * memory_size_ + m; }

  std::size_t num_states_ = 0;
  std::size_t memory_size_ = 1;
  std::size_t initial_ = 0;
  std::vector<std::size_t> update_;
  std::vector<ActionDistribution<Num>> choice_;
};

namespace detail {

template <class Num>
void check_distribution(const StochasticGame<Num>& g, StateId s, const ActionDistribution<Num>& d,
                        const std::string& where, std::vector<std::string>& out) {
  using Traits = NumTraits<Num>;
  if (d.empty()) {
    out.push_back("no action distribution at " + where);
    return;
  }
  Num mass = Traits::zero();
  for (const auto& [a, p] : d) {
    if (!g.is_available(s, a))
      out.push_back("action '" + (a < g.num_actions() ? g.action_name(a) : std::to_string(a)) +
                    "' not available at " + where);
    mass += p;
  }
  Num diff = Traits::abs(Num(mass - Traits::one()));
  if (diff > Traits::mass_tolerance()) out.push_back("strategy mass != 1 at " + where + ": " + format_number(mass));
}

}  // namespace detail

template <class Num>
std::vector<std::string> validate_strategy(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma) {
  std::vector<std::string> out;
  if (sigma.num_states() != g.num_states()) {
    out.push_back("strategy covers " + std::to_string(sigma.num_states()) + " states, game has " +
                  std::to_string(g.num_states()));
    return out;
  }
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) detail::check_distribution(g, s, sigma.at(s), "'" + g.state_name(s) + "'", out);
  return out;
}

template <class Num>
std::vector<std::string> validate_strategy(const StochasticGame<Num>& g, const FiniteMemoryStrategy<Num>& sigma) {
  std::vector<std::string> out;
  if (sigma.num_states() != g.num_states()) {
    out.push_back("strategy covers " + std::to_string(sigma.num_states()) + " states, game has " +
                  std::to_string(g.num_states()));
    return out;
  }
  if (sigma.memory_size() == 0 || sigma.initial_memory() >= sigma.memory_size()) {
    out.push_back("initial memory outside the memory set");
    return out;
  }
  for (StateId s = 0; s < g.num_states(); ++s) {
    for (std::size_t m = 0; m < sigma.memory_size(); ++m) {
      std::string where = "'" + g.state_name(s) + "@" + std::to_string(m) + "'";
      if (sigma.update(s, m) >= sigma.memory_size()) out.push_back("memory update leaves the memory set at " + where);
      if (g.is_system(s)) detail::check_distribution(g, s, sigma.at(s, m), where, out);
    }
  }
  return out;
}

/// Synchronous product of a game with the memory automaton of a strategy.
/// Product state (s, m) is named "s@m"; Rabin sets are lifted as E x M and
/// F x M; the product initial set is I x {m0}.
template <class Num>
struct ProductGame {
  StochasticGame<Num> game;
  MemorylessStrategy<Num> strategy;
  std::vector<StateId> index;  // (s, m) -> product id, row-major in s
  std::size_t memory_size = 1;

  StateId at(StateId s, std::size_t m) const { return index.at(s * memory_size + m); }
};

template <class Num>
ProductGame<Num> product_with_memory(const StochasticGame<Num>& g, const FiniteMemoryStrategy<Num>& sigma) {
  const std::size_t k = sigma.memory_size();
  const std::size_t n = g.num_states();

  std::vector<std::pair<std::string, std::size_t>> named;  // name, flat (s, m)
  for (StateId s = 0; s < n; ++s)
    for (std::size_t m = 0; m < k; ++m) named.emplace_back(g.state_name(s) + "@" + std::to_string(m), s * k + m);
  std::sort(named.begin(), named.end());
  std::vector<StateId> index(n * k);
  std::vector<std::string> names;
  for (StateId id = 0; id < named.size(); ++id) {
    index[named[id].second] = id;
    names.push_back(named[id].first);
  }

  std::vector<bool> system(n * k);
  std::vector<std::vector<Choice<Num>>> choices(n * k);
  StateSet init(n * k);
  std::vector<RabinPair> pairs(g.rabin_pairs().size(), RabinPair{StateSet(n * k), StateSet(n * k)});
  MemorylessStrategy<Num> lifted(n * k);

  for (StateId s = 0; s < n; ++s) {
    for (std::size_t m = 0; m < k; ++m) {
      StateId id = index[s * k + m];
      system[id] = g.is_system(s);
      std::size_t next = sigma.update(s, m);
      for (const auto& c : g.choices(s)) {
        Choice<Num> nc{c.action, {}};
        for (const auto& t : c.outcomes) nc.outcomes.push_back({index[t.to * k + next], t.prob, t.reward});
        choices[id].push_back(std::move(nc));
      }
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (g.rabin_pairs()[i].avoid.contains(s)) pairs[i].avoid.insert(id);
        if (g.rabin_pairs()[i].reach.contains(s)) pairs[i].reach.insert(id);
      }
      if (g.is_system(s)) lifted.set(id, sigma.at(s, m));
    }
    if (g.initial().contains(s)) init.insert(index[s * k + sigma.initial_memory()]);
  }

  ProductGame<Num> out{StochasticGame<Num>(std::move(names), std::move(system), std::move(init), g.action_names(),
                                           std::move(choices), std::move(pairs), g.gamma()),
                       std::move(lifted), std::move(index), k};
  return out;
}

}  // namespace rabin
