#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rabin/number.hpp"
#include "rabin/state_set.hpp"

namespace rabin {

/// Structural error while assembling a game (unknown names, duplicates).
class GameFormatError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The requested state subset does not induce a subgame.
class NotClosedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <class Num>
struct Transition {
  StateId to;
  Num prob;
  Num reward;
};

/// One available action at a state with its successor distribution,
/// ordered by successor id. Only positive-probability entries are stored.
template <class Num>
struct Choice {
  ActionId action;
  std::vector<Transition<Num>> outcomes;
};

struct RabinPair {
  StateSet avoid;   // E: visited finitely often
  StateSet reach;   // F: visited infinitely often
};

/// Turn-based stochastic Rabin game with a discounted reward.
///
/// States and actions are identified by strings; ids are assigned in
/// lexicographic order by GameBuilder, so every iteration over ids is
/// deterministic. Derived games (subgames, split games, products) may
/// append to the action table but never reorder it.
template <class Num>
class StochasticGame {
public:
  using Traits = NumTraits<Num>;

  StochasticGame() = default;

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_actions() const { return action_names_.size(); }

  const std::string& state_name(StateId s) const { return state_names_.at(s); }
  const std::string& action_name(ActionId a) const { return action_names_.at(a); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& action_names() const { return action_names_; }

  std::optional<StateId> find_state(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }
  StateId state_id(const std::string& name) const {
    auto s = find_state(name);
    if (!s) throw GameFormatError("unknown state '" + name + "'");
    return *s;
  }
  std::optional<ActionId> find_action(const std::string& name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
  }
  ActionId action_id(const std::string& name) const {
    auto a = find_action(name);
    if (!a) throw GameFormatError("unknown action '" + name + "'");
    return *a;
  }

  bool is_system(StateId s) const { return system_.at(s); }
  bool is_environment(StateId s) const { return !system_.at(s); }
  const StateSet& initial() const { return initial_; }
  const std::vector<RabinPair>& rabin_pairs() const { return pairs_; }
  const Num& gamma() const { return gamma_; }
  void set_gamma(const Num& gamma) { gamma_ = gamma; }

  /// Largest instantaneous reward over all stored transitions (R_max).
  const Num& max_reward() const { return max_reward_; }

  const std::vector<Choice<Num>>& choices(StateId s) const { return choices_.at(s); }

  const Choice<Num>* find_choice(StateId s, ActionId a) const {
    const auto& cs = choices_.at(s);
    auto it = std::lower_bound(cs.begin(), cs.end(), a,
                               [](const Choice<Num>& c, ActionId x) { return c.action < x; });
    if (it == cs.end() || it->action != a) return nullptr;
    return &*it;
  }

  std::vector<ActionId> available(StateId s) const {
    std::vector<ActionId> out;
    for (const auto& c : choices_.at(s)) out.push_back(c.action);
    return out;
  }

  bool is_available(StateId s, ActionId a) const { return find_choice(s, a) != nullptr; }

  StateSet system_states() const {
    StateSet r(num_states());
    for (StateId s = 0; s < num_states(); ++s)
      if (system_[s]) r.insert(s);
    return r;
  }

  StateSet all_states() const { return StateSet::full(num_states()); }

  StateSet make_set(const std::vector<std::string>& names) const {
    StateSet r(num_states());
    for (const auto& n : names) r.insert(state_id(n));
    return r;
  }

  std::vector<std::string> names_of(const StateSet& set) const {
    std::vector<std::string> out;
    for (StateId s : set.members()) out.push_back(state_names_[s]);
    return out;
  }

  /// Low-level constructor; GameBuilder is the usual entry point.
  StochasticGame(std::vector<std::string> state_names, std::vector<bool> system, StateSet initial,
                 std::vector<std::string> action_names, std::vector<std::vector<Choice<Num>>> choices,
                 std::vector<RabinPair> pairs, Num gamma)
      : state_names_(std::move(state_names)),
        action_names_(std::move(action_names)),
        system_(std::move(system)),
        initial_(std::move(initial)),
        choices_(std::move(choices)),
        pairs_(std::move(pairs)),
        gamma_(std::move(gamma)) {
    for (StateId s = 0; s < state_names_.size(); ++s) state_index_.emplace(state_names_[s], s);
    for (ActionId a = 0; a < action_names_.size(); ++a) action_index_.emplace(action_names_[a], a);
    max_reward_ = Traits::zero();
    for (auto& cs : choices_) {
      std::sort(cs.begin(), cs.end(), [](const Choice<Num>& x, const Choice<Num>& y) { return x.action < y.action; });
      for (auto& c : cs) {
        std::sort(c.outcomes.begin(), c.outcomes.end(),
                  [](const Transition<Num>& x, const Transition<Num>& y) { return x.to < y.to; });
        for (const auto& t : c.outcomes)
          if (t.reward > max_reward_) max_reward_ = t.reward;
      }
    }
  }

  friend bool operator==(const StochasticGame& a, const StochasticGame& b) {
    if (a.state_names_ != b.state_names_ || a.action_names_ != b.action_names_ || a.system_ != b.system_ ||
        !(a.initial_ == b.initial_) || !(a.gamma_ == b.gamma_) || a.pairs_.size() != b.pairs_.size())
      return false;
    for (std::size_t i = 0; i < a.pairs_.size(); ++i)
      if (!(a.pairs_[i].avoid == b.pairs_[i].avoid) || !(a.pairs_[i].reach == b.pairs_[i].reach)) return false;
    for (StateId s = 0; s < a.num_states(); ++s) {
      const auto& x = a.choices_[s];
      const auto& y = b.choices_[s];
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].action != y[i].action || x[i].outcomes.size() != y[i].outcomes.size()) return false;
        for (std::size_t j = 0; j < x[i].outcomes.size(); ++j) {
          const auto& t = x[i].outcomes[j];
          const auto& u = y[i].outcomes[j];
          if (t.to != u.to || !(t.prob == u.prob) || !(t.reward == u.reward)) return false;
        }
      }
    }
    return true;
  }

private:
  std::vector<std::string> state_names_;
  std::vector<std::string> action_names_;
  std::map<std::string, StateId> state_index_;
  std::map<std::string, ActionId> action_index_;
  std::vector<bool> system_;
  StateSet initial_;
  std::vector<std::vector<Choice<Num>>> choices_;
  std::vector<RabinPair> pairs_;
  Num gamma_{};
  Num max_reward_{};
};

/// Collects a game by name and assigns lexicographic ids on build().
template <class Num>
class GameBuilder {
public:
  GameBuilder& state(const std::string& name, bool system) {
    auto [it, inserted] = states_.emplace(name, system);
    if (!inserted && it->second != system)
      throw GameFormatError("state '" + name + "' declared with conflicting owners");
    return *this;
  }
  GameBuilder& system_state(const std::string& name) { return state(name, true); }
  GameBuilder& env_state(const std::string& name) { return state(name, false); }

  GameBuilder& initial(const std::string& name) {
    initial_.insert(name);
    return *this;
  }

  GameBuilder& transition(const std::string& from, const std::string& action, const std::string& to, Num prob,
                          Num reward) {
    auto key = std::make_tuple(from, action, to);
    if (!seen_.insert(key).second)
      throw GameFormatError("duplicate transition " + from + " --" + action + "--> " + to);
    edges_.push_back({from, action, to, std::move(prob), std::move(reward)});
    return *this;
  }

  GameBuilder& rabin_pair(std::vector<std::string> avoid, std::vector<std::string> reach) {
    pairs_.emplace_back(std::move(avoid), std::move(reach));
    return *this;
  }

  GameBuilder& gamma(Num g) {
    gamma_ = std::move(g);
    return *this;
  }

  StochasticGame<Num> build() const {
    std::vector<std::string> names;
    std::vector<bool> system;
    for (const auto& [n, sys] : states_) {
      names.push_back(n);
      system.push_back(sys);
    }
    std::map<std::string, StateId> sid;
    for (StateId i = 0; i < names.size(); ++i) sid[names[i]] = i;
    auto lookup = [&](const std::string& n) {
      auto it = sid.find(n);
      if (it == sid.end()) throw GameFormatError("unknown state '" + n + "'");
      return it->second;
    };

    std::set<std::string> action_set;
    for (const auto& e : edges_) action_set.insert(e.action);
    std::vector<std::string> actions(action_set.begin(), action_set.end());
    std::map<std::string, ActionId> aid;
    for (ActionId i = 0; i < actions.size(); ++i) aid[actions[i]] = i;

    std::vector<std::map<ActionId, std::vector<Transition<Num>>>> grouped(names.size());
    for (const auto& e : edges_) grouped[lookup(e.from)][aid[e.action]].push_back({lookup(e.to), e.prob, e.reward});
    std::vector<std::vector<Choice<Num>>> choices(names.size());
    for (StateId s = 0; s < names.size(); ++s)
      for (auto& [a, outs] : grouped[s]) choices[s].push_back({a, std::move(outs)});

    StateSet init(names.size());
    for (const auto& n : initial_) init.insert(lookup(n));

    std::vector<RabinPair> pairs;
    for (const auto& [e, f] : pairs_) {
      RabinPair p{StateSet(names.size()), StateSet(names.size())};
      for (const auto& n : e) p.avoid.insert(lookup(n));
      for (const auto& n : f) p.reach.insert(lookup(n));
      pairs.push_back(std::move(p));
    }
    return StochasticGame<Num>(std::move(names), std::move(system), std::move(init), std::move(actions),
                               std::move(choices), std::move(pairs), gamma_);
  }

private:
  struct Edge {
    std::string from, action, to;
    Num prob, reward;
  };
  std::map<std::string, bool> states_;
  std::set<std::string> initial_;
  std::vector<Edge> edges_;
  std::set<std::tuple<std::string, std::string, std::string>> seen_;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs_;
  Num gamma_{};
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

using ActionFilter = std::function<bool(StateId, ActionId)>;

template <class Num>
StateSet reachable_states(const StochasticGame<Num>& g, const StateSet& seeds, const ActionFilter& filter = {}) {
  StateSet seen = seeds;
  std::deque<StateId> queue;
  for (StateId s : seeds.members()) queue.push_back(s);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& c : g.choices(s)) {
      if (filter && !filter(s, c.action)) continue;
      for (const auto& t : c.outcomes) {
        if (!(t.prob > 0) || seen.contains(t.to)) continue;
        seen.insert(t.to);
        queue.push_back(t.to);
      }
    }
  }
  return seen;
}

/// Lists every violated well-formedness invariant; empty iff the game is valid.
template <class Num>
ValidationReport validate_game(const StochasticGame<Num>& g) {
  using Traits = NumTraits<Num>;
  ValidationReport r;
  auto add = [&](std::string msg) { r.violations.push_back(std::move(msg)); };

  if (g.num_states() == 0) add("game has no states");
  if (!(g.gamma() > 0 && g.gamma() < 1)) add("discount factor not in (0,1): " + format_number(g.gamma()));
  if (g.initial().empty()) add("initial set is empty");

  for (StateId s = 0; s < g.num_states(); ++s) {
    const auto& name = g.state_name(s);
    if (g.choices(s).empty()) add("state '" + name + "' has no available action");
    for (const auto& c : g.choices(s)) {
      const auto& act = g.action_name(c.action);
      Num mass = Traits::zero();
      for (const auto& t : c.outcomes) {
        if (!(t.prob > 0) || t.prob > Traits::one())
          add("probability out of (0,1] at (" + name + ", " + act + ") -> " + g.state_name(t.to));
        if (t.reward < 0) add("negative reward at (" + name + ", " + act + ") -> " + g.state_name(t.to));
        mass += t.prob;
      }
      Num diff = Traits::abs(Num(mass - Traits::one()));
      if (diff > Traits::mass_tolerance())
        add("distribution mass != 1 at (" + name + ", " + act + "): " + format_number(mass));
    }
  }

  for (std::size_t i = 0; i < g.rabin_pairs().size(); ++i)
    if (g.rabin_pairs()[i].avoid.intersects(g.rabin_pairs()[i].reach))
      add("Rabin pair " + std::to_string(i + 1) + " not disjoint");

  if (!g.initial().empty()) {
    StateSet reach = reachable_states(g, g.initial());
    for (StateId s = 0; s < g.num_states(); ++s)
      if (!reach.contains(s)) add("state '" + g.state_name(s) + "' unreachable from the initial set");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Restrictions

/// Game with the same state set where `keep(s, a)` decides which choices
/// survive. Callers are responsible for leaving every state an action.
template <class Num>
StochasticGame<Num> filter_actions(const StochasticGame<Num>& g, const ActionFilter& keep) {
  std::vector<std::vector<Choice<Num>>> choices(g.num_states());
  std::vector<bool> system(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    system[s] = g.is_system(s);
    for (const auto& c : g.choices(s))
      if (keep(s, c.action)) choices[s].push_back(c);
  }
  return StochasticGame<Num>(g.state_names(), std::move(system), g.initial(), g.action_names(), std::move(choices),
                             g.rabin_pairs(), g.gamma());
}

namespace detail {

/// Keeps `subset` (re-indexed in id order) and the choices accepted by `keep`.
template <class Num>
StochasticGame<Num> restrict_states(const StochasticGame<Num>& g, const StateSet& subset,
                                    const std::function<bool(StateId, const Choice<Num>&)>& keep) {
  std::vector<StateId> kept = subset.members();
  std::vector<StateId> remap(g.num_states(), static_cast<StateId>(-1));
  for (StateId i = 0; i < kept.size(); ++i) remap[kept[i]] = i;

  std::vector<std::string> names;
  std::vector<bool> system;
  std::vector<std::vector<Choice<Num>>> choices(kept.size());
  StateSet init(kept.size());
  for (StateId i = 0; i < kept.size(); ++i) {
    StateId s = kept[i];
    names.push_back(g.state_name(s));
    system.push_back(g.is_system(s));
    if (g.initial().contains(s)) init.insert(i);
    for (const auto& c : g.choices(s)) {
      if (!keep(s, c)) continue;
      Choice<Num> nc{c.action, {}};
      for (const auto& t : c.outcomes) nc.outcomes.push_back({remap[t.to], t.prob, t.reward});
      choices[i].push_back(std::move(nc));
    }
  }
  std::vector<RabinPair> pairs;
  for (const auto& p : g.rabin_pairs()) {
    RabinPair q{StateSet(kept.size()), StateSet(kept.size())};
    for (StateId i = 0; i < kept.size(); ++i) {
      if (p.avoid.contains(kept[i])) q.avoid.insert(i);
      if (p.reach.contains(kept[i])) q.reach.insert(i);
    }
    pairs.push_back(std::move(q));
  }
  return StochasticGame<Num>(std::move(names), std::move(system), std::move(init), g.action_names(),
                             std::move(choices), std::move(pairs), g.gamma());
}

template <class Num>
bool stays_inside(const Choice<Num>& c, const StateSet& subset) {
  return std::all_of(c.outcomes.begin(), c.outcomes.end(), [&](const auto& t) { return subset.contains(t.to); });
}

}  // namespace detail

/// G restricted to `subset`: available actions are those whose support stays
/// inside, Rabin sets and initial states are intersected.
/// Throws NotClosedError when `subset` does not induce a subgame.
template <class Num>
StochasticGame<Num> induced_subgame(const StochasticGame<Num>& g, const StateSet& subset) {
  if (subset.empty()) throw NotClosedError("induced subgame requires a nonempty state subset");
  for (StateId s : subset.members()) {
    const auto& cs = g.choices(s);
    if (g.is_environment(s)) {
      for (const auto& c : cs)
        if (!detail::stays_inside(c, subset))
          throw NotClosedError("environment state '" + g.state_name(s) + "' can leave the subset via '" +
                               g.action_name(c.action) + "'");
    } else if (std::none_of(cs.begin(), cs.end(), [&](const auto& c) { return detail::stays_inside(c, subset); })) {
      throw NotClosedError("system state '" + g.state_name(s) + "' has no action staying inside the subset");
    }
  }
  return detail::restrict_states<Num>(g, subset,
                                      [&](StateId, const Choice<Num>& c) { return detail::stays_inside(c, subset); });
}

/// Drops states not reachable from the initial set.
template <class Num>
StochasticGame<Num> prune_unreachable(const StochasticGame<Num>& g) {
  StateSet keep = reachable_states(g, g.initial());
  if (keep.size() == g.num_states()) return g;
  return detail::restrict_states<Num>(g, keep, [](StateId, const Choice<Num>&) { return true; });
}

/// Re-expresses a set of one game in another game's ids by state name.
template <class NumA, class NumB>
StateSet translate_set(const StochasticGame<NumA>& from, const StateSet& set, const StochasticGame<NumB>& to) {
  StateSet r(to.num_states());
  for (StateId s : set.members())
    if (auto t = to.find_state(from.state_name(s))) r.insert(*t);
  return r;
}

/// Converts the scalar type of every probability, reward and the discount.
template <class To, class From>
StochasticGame<To> convert_game(const StochasticGame<From>& g) {
  std::vector<std::vector<Choice<To>>> choices(g.num_states());
  std::vector<bool> system(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    system[s] = g.is_system(s);
    for (const auto& c : g.choices(s)) {
      Choice<To> nc{c.action, {}};
      for (const auto& t : c.outcomes)
        nc.outcomes.push_back({t.to, convert_number<To>(t.prob), convert_number<To>(t.reward)});
      choices[s].push_back(std::move(nc));
    }
  }
  return StochasticGame<To>(g.state_names(), std::move(system), g.initial(), g.action_names(), std::move(choices),
                            g.rabin_pairs(), convert_number<To>(g.gamma()));
}

}  // namespace rabin
