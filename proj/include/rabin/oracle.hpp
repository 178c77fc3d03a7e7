#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabin/end_component.hpp"
#include "rabin/env_mdp.hpp"
#include "rabin/game.hpp"
#include "rabin/linear.hpp"
#include "rabin/qualitative.hpp"
#include "rabin/quantitative.hpp"

// Brute-force reference implementations. Everything here is exponential and
// deliberately shares no algorithm with the qualitative and quantitative
// engines beyond the data model and the linear solver.

namespace rabin::oracle {

class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OracleBudget {
  std::size_t max_states = 12;
  std::uint64_t max_strategies = 1'000'000;
};

namespace detail {

inline std::uint64_t product_of_counts(const std::vector<std::size_t>& counts, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t k : counts) {
    if (k == 0) return 0;
    if (total > cap / k) return cap + 1;
    total *= k;
  }
  return total;
}

/// Mixed-radix enumeration of one index per slot; the last slot varies
/// fastest. `visit` returns false to stop.
template <class Visit>
void for_each_assignment(const std::vector<std::size_t>& counts, Visit&& visit) {
  for (std::size_t k : counts)
    if (k == 0) return;
  std::vector<std::size_t> digit(counts.size(), 0);
  for (;;) {
    if (!visit(digit)) return;
    std::size_t i = counts.size();
    for (;;) {
      if (i == 0) return;
      --i;
      if (++digit[i] < counts[i]) break;
      digit[i] = 0;
    }
  }
}

}  // namespace detail

/// Calls `visit(strategy)` for every deterministic memoryless system
/// strategy in lexicographic order; returns the number visited.
template <class Num, class Visit>
std::uint64_t enumerate_det_memoryless(const StochasticGame<Num>& g, Visit&& visit, const OracleBudget& budget = {}) {
  std::vector<StateId> sys;
  std::vector<std::size_t> counts;
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) {
      sys.push_back(s);
      counts.push_back(g.choices(s).size());
    }
  if (detail::product_of_counts(counts, budget.max_strategies) > budget.max_strategies)
    throw BudgetExceeded("strategy enumeration exceeds " + std::to_string(budget.max_strategies));
  std::uint64_t visited = 0;
  std::vector<ActionId> pick(g.num_states(), 0);
  detail::for_each_assignment(counts, [&](const std::vector<std::size_t>& digit) {
    for (std::size_t i = 0; i < sys.size(); ++i) pick[sys[i]] = g.choices(sys[i])[digit[i]].action;
    ++visited;
    visit(deterministic_strategy(g, pick));
    return true;
  });
  return visited;
}

template <class Num>
std::vector<MemorylessStrategy<Num>> all_det_memoryless(const StochasticGame<Num>& g, const OracleBudget& budget = {}) {
  std::vector<MemorylessStrategy<Num>> out;
  enumerate_det_memoryless(g, [&](MemorylessStrategy<Num> s) { out.push_back(std::move(s)); }, budget);
  return out;
}

/// Every end component, found by checking each nonempty state subset with
/// the largest choice assignment that stays inside it.
template <class Num>
std::vector<EndComponent> enumerate_all_ecs(const EnvMDP<Num>& mdp, const OracleBudget& budget = {}) {
  const std::size_t n = mdp.num_states();
  if (n > budget.max_states)
    throw BudgetExceeded("end-component enumeration limited to " + std::to_string(budget.max_states) + " states");
  std::vector<EndComponent> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    auto in = [&](StateId s) { return (mask >> s) & 1U; };
    EndComponent ec{StateSet(n), std::vector<std::vector<std::size_t>>(n)};
    bool closed = true;
    for (StateId s = 0; s < n && closed; ++s) {
      if (!in(s)) continue;
      ec.states.insert(s);
      for (std::size_t ci = 0; ci < mdp.choices[s].size(); ++ci) {
        bool stays = true;
        for (const auto& [t, p] : mdp.choices[s][ci].successors) stays = stays && in(t);
        if (stays) ec.choices[s].push_back(ci);
      }
      closed = !ec.choices[s].empty();
    }
    if (!closed) continue;
    // Strong connectivity: every member reaches every other member.
    bool connected = true;
    for (StateId src = 0; src < n && connected; ++src) {
      if (!in(src)) continue;
      std::vector<bool> seen(n, false);
      std::vector<StateId> stack{src};
      seen[src] = true;
      while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (std::size_t ci : ec.choices[s])
          for (const auto& [t, p] : mdp.choices[s][ci].successors)
            if (!seen[t]) {
              seen[t] = true;
              stack.push_back(t);
            }
      }
      for (StateId t = 0; t < n; ++t)
        if (in(t) && !seen[t]) connected = false;
    }
    if (connected) out.push_back(std::move(ec));
  }
  return out;
}

/// Per-state almost-sure verdict of a fixed system strategy: s wins iff no
/// end component violating every Rabin pair is reachable from s.
template <class Num>
std::vector<bool> oracle_winning_states(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma,
                                        const OracleBudget& budget = {}) {
  EnvMDP<Num> mdp = fix_system_strategy(g, sigma);
  std::vector<StateSet> bad;
  for (auto& ec : enumerate_all_ecs(mdp, budget)) {
    bool good = false;
    for (const auto& p : g.rabin_pairs())
      good = good || (ec.states.intersects(p.reach) && !ec.states.intersects(p.avoid));
    if (!good) bad.push_back(ec.states);
  }
  std::vector<bool> win(g.num_states(), true);
  for (StateId s = 0; s < g.num_states(); ++s) {
    StateSet reach = mdp_reachable(mdp, StateSet(g.num_states(), {s}));
    for (const auto& b : bad)
      if (reach.intersects(b)) win[s] = false;
  }
  return win;
}

template <class Num>
StateSet oracle_as_region(const StochasticGame<Num>& g, const OracleBudget& budget = {}) {
  StateSet region(g.num_states());
  enumerate_det_memoryless(
      g,
      [&](const MemorylessStrategy<Num>& sigma) {
        std::vector<bool> win = oracle_winning_states(g, sigma, budget);
        for (StateId s = 0; s < g.num_states(); ++s)
          if (win[s]) region.insert(s);
      },
      budget);
  return region;
}

/// Maximin over all pairs of deterministic memoryless strategies, each pair
/// evaluated by one linear solve.
template <class Num>
ValueFunction<Num> oracle_exact_values(const StochasticGame<Num>& g, const OracleBudget& budget = {}) {
  const std::size_t n = g.num_states();
  std::vector<StateId> env;
  std::vector<std::size_t> env_counts, sys_counts;
  for (StateId s = 0; s < n; ++s) {
    if (g.is_system(s))
      sys_counts.push_back(g.choices(s).size());
    else {
      env.push_back(s);
      env_counts.push_back(g.choices(s).size());
    }
  }
  std::uint64_t pairs = detail::product_of_counts(sys_counts, budget.max_strategies);
  std::uint64_t env_total = detail::product_of_counts(env_counts, budget.max_strategies);
  if (pairs > budget.max_strategies || env_total > budget.max_strategies ||
      (env_total > 0 && pairs > budget.max_strategies / env_total))
    throw BudgetExceeded("strategy-pair enumeration exceeds " + std::to_string(budget.max_strategies));

  std::optional<std::vector<Num>> best;
  enumerate_det_memoryless(
      g,
      [&](const MemorylessStrategy<Num>& sigma) {
        std::optional<std::vector<Num>> worst;
        detail::for_each_assignment(env_counts, [&](const std::vector<std::size_t>& digit) {
          std::vector<std::vector<std::pair<std::size_t, Num>>> rows(n);
          std::vector<Num> reward(n, NumTraits<Num>::zero());
          std::vector<const Choice<Num>*> used(n, nullptr);
          for (std::size_t i = 0; i < env.size(); ++i) used[env[i]] = &g.choices(env[i])[digit[i]];
          for (StateId s = 0; s < n; ++s) {
            if (g.is_system(s)) used[s] = g.find_choice(s, sigma.at(s).front().first);
            for (const auto& t : used[s]->outcomes) {
              rows[s].emplace_back(t.to, t.prob);
              reward[s] += t.prob * t.reward;
            }
          }
          // Plain dense solve: independent of the block solver used elsewhere.
          std::vector<std::vector<Num>> a(n, std::vector<Num>(n, NumTraits<Num>::zero()));
          for (StateId s = 0; s < n; ++s) {
            a[s][s] += NumTraits<Num>::one();
            for (const auto& [t, p] : rows[s]) a[s][t] -= g.gamma() * p;
          }
          std::vector<Num> v = solve_linear(std::move(a), reward);
          if (!worst) {
            worst = std::move(v);
          } else {
            for (StateId s = 0; s < n; ++s)
              if (v[s] < (*worst)[s]) (*worst)[s] = v[s];
          }
          return true;
        });
        if (!worst) return;
        if (!best) {
          best = std::move(*worst);
        } else {
          for (StateId s = 0; s < n; ++s)
            if ((*worst)[s] > (*best)[s]) (*best)[s] = (*worst)[s];
        }
      },
      budget);
  return {best ? std::move(*best) : std::vector<Num>(n, NumTraits<Num>::zero()), NumTraits<Num>::zero()};
}

}  // namespace rabin::oracle
