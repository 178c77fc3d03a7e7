#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "rabin/env_mdp.hpp"
#include "rabin/graph.hpp"

namespace rabin {

/// A closed, strongly connected sub-MDP: a state set together with, for
/// every member, the indices of MDP choices whose successors stay inside.
struct EndComponent {
  StateSet states;
  std::vector<std::vector<std::size_t>> choices;  // indexed by state id; empty outside

  friend bool operator==(const EndComponent& a, const EndComponent& b) {
    return a.states == b.states && a.choices == b.choices;
  }
};

/// Least i with U meeting F_i and avoiding E_i, if any.
inline std::optional<std::size_t> rabin_good(const StateSet& u, const std::vector<RabinPair>& pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (u.intersects(pairs[i].reach) && !u.intersects(pairs[i].avoid)) return i;
  return std::nullopt;
}

/// Maximal end components of the sub-MDP induced by `within`, ordered by
/// their least state id.
template <class Num>
std::vector<EndComponent> maximal_end_components(const EnvMDP<Num>& mdp, const StateSet& within) {
  const std::size_t n = mdp.num_states();
  StateSet active = within;
  std::vector<std::vector<std::size_t>> allowed(n);
  for (StateId s : active.members())
    for (std::size_t i = 0; i < mdp.choices[s].size(); ++i) allowed[s].push_back(i);

  auto inside = [&](StateId s, std::size_t ci, const std::function<bool(StateId)>& keep) {
    const auto& succ = mdp.choices[s][ci].successors;
    return std::all_of(succ.begin(), succ.end(), [&](const auto& e) { return keep(e.first); });
  };

  std::vector<long> comp;
  for (;;) {
    // Drop choices leaving the active set, and states left without choices.
    bool shrunk = true;
    while (shrunk) {
      shrunk = false;
      for (StateId s : active.members()) {
        std::erase_if(allowed[s], [&](std::size_t ci) { return !inside(s, ci, [&](StateId t) { return active.contains(t); }); });
        if (allowed[s].empty()) {
          active.erase(s);
          shrunk = true;
        }
      }
    }
    comp = detail::strongly_connected(n, active, [&](StateId s, std::vector<StateId>& out) {
      for (std::size_t ci : allowed[s])
        for (const auto& e : mdp.choices[s][ci].successors) out.push_back(e.first);
    });
    bool changed = false;
    for (StateId s : active.members()) {
      auto before = allowed[s].size();
      std::erase_if(allowed[s], [&](std::size_t ci) { return !inside(s, ci, [&](StateId t) { return comp[t] == comp[s]; }); });
      if (allowed[s].size() != before) changed = true;
      if (allowed[s].empty()) active.erase(s);
    }
    if (!changed) break;
  }

  std::vector<EndComponent> out;
  std::vector<long> slot(n, -1);
  for (StateId s : active.members()) {
    long c = comp[s];
    long& where = slot[static_cast<std::size_t>(c)];
    if (where == -1) {
      where = static_cast<long>(out.size());
      out.push_back(EndComponent{StateSet(n), std::vector<std::vector<std::size_t>>(n)});
    }
    auto& ec = out[static_cast<std::size_t>(where)];
    ec.states.insert(s);
    ec.choices[s] = allowed[s];
  }
  return out;
}

namespace detail {

template <class Num>
void collect_bad(const EnvMDP<Num>& mdp, const std::vector<RabinPair>& pairs, const StateSet& within,
                 bool first_only, std::vector<EndComponent>& out) {
  for (auto& mec : maximal_end_components(mdp, within)) {
    StateSet removed(mdp.num_states());
    bool any_good = false;
    for (const auto& p : pairs) {
      if (mec.states.intersects(p.reach) && !mec.states.intersects(p.avoid)) {
        any_good = true;
        removed |= p.reach;
      }
    }
    if (!any_good) {
      out.push_back(std::move(mec));
      if (first_only) return;
      continue;
    }
    // A bad EC inside this MEC cannot meet F_i for any pair good here.
    StateSet rest = mec.states - removed;
    if (!rest.empty()) {
      collect_bad(mdp, pairs, rest, first_only, out);
      if (first_only && !out.empty()) return;
    }
  }
}

}  // namespace detail

/// Every end component not satisfying the Rabin condition lies inside one of
/// the returned end components, each of which is itself bad.
template <class Num>
std::vector<EndComponent> bad_end_components(const EnvMDP<Num>& mdp, const std::vector<RabinPair>& pairs,
                                             const StateSet& within) {
  std::vector<EndComponent> out;
  detail::collect_bad(mdp, pairs, within, false, out);
  return out;
}

template <class Num>
StateSet mdp_reachable(const EnvMDP<Num>& mdp, const StateSet& from) {
  StateSet seen = from;
  std::deque<StateId> queue;
  for (StateId s : from.members()) queue.push_back(s);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& c : mdp.choices[s])
      for (const auto& [t, p] : c.successors)
        if (!seen.contains(t)) {
          seen.insert(t);
          queue.push_back(t);
        }
  }
  return seen;
}

/// States with a path (under some choice) into `target`.
template <class Num>
StateSet mdp_can_reach(const EnvMDP<Num>& mdp, const StateSet& target) {
  const std::size_t n = mdp.num_states();
  std::vector<std::vector<StateId>> preds(n);
  for (StateId s = 0; s < n; ++s)
    for (const auto& c : mdp.choices[s])
      for (const auto& [t, p] : c.successors) preds[t].push_back(s);
  StateSet seen = target;
  std::deque<StateId> queue;
  for (StateId s : target.members()) queue.push_back(s);
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    for (StateId s : preds[t])
      if (!seen.contains(s)) {
        seen.insert(s);
        queue.push_back(s);
      }
  }
  return seen;
}

/// Some end component reachable from `from` that satisfies no Rabin pair.
template <class Num>
std::optional<EndComponent> find_bad_ec(const EnvMDP<Num>& mdp, const std::vector<RabinPair>& pairs,
                                        const StateSet& from) {
  std::vector<EndComponent> out;
  detail::collect_bad(mdp, pairs, mdp_reachable(mdp, from), true, out);
  if (out.empty()) return std::nullopt;
  return std::move(out.front());
}

}  // namespace rabin
