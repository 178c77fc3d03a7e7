#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <optional>
#include <vector>

#include "rabin/env_mdp.hpp"
#include "rabin/game.hpp"
#include "rabin/linear.hpp"
#include "rabin/strategy.hpp"

namespace rabin {

enum class SolveKind { exact, iterative };

/// Exact mode runs policy iteration with linear solves; iterative mode runs
/// Jacobi value iteration from V = 0 until the a-posteriori bound
/// r * gamma / (1 - gamma) on the distance to the fixpoint is below
/// `tolerance`, where r is the last sup-norm residual.
struct SolveMode {
  SolveKind kind = SolveKind::exact;
  double tolerance = 1e-9;
  std::size_t max_sweeps = 10'000'000;

  static SolveMode exact() { return {SolveKind::exact}; }
  static SolveMode iterative(double tol) { return {SolveKind::iterative, tol}; }
};

template <class Num>
struct ValueFunction {
  std::vector<Num> values;
  Num error_bound{};  // sup-norm distance to the true value is at most this

  const Num& operator[](StateId s) const { return values.at(s); }
};

template <class Num>
struct OptimalActionSets {
  std::vector<std::vector<ActionId>> sets;  // empty at environment states
  Num tolerance{};

  const std::vector<ActionId>& at(StateId s) const { return sets.at(s); }
  bool contains(StateId s, ActionId a) const {
    for (ActionId b : sets.at(s))
      if (b == a) return true;
    return false;
  }
};

template <class Num>
Num q_value(const StochasticGame<Num>& g, const std::vector<Num>& v, const Choice<Num>& c) {
  Num q = NumTraits<Num>::zero();
  for (const auto& t : c.outcomes) q += t.prob * (t.reward + g.gamma() * v[t.to]);
  return q;
}

/// Expected one-step reward plus discounted continuation of taking `a` at `s`.
template <class Num>
Num q_value(const StochasticGame<Num>& g, const ValueFunction<Num>& v, StateId s, ActionId a) {
  const Choice<Num>* c = g.find_choice(s, a);
  if (c == nullptr) throw std::invalid_argument("action '" + g.action_name(a) + "' not available at '" +
                                                g.state_name(s) + "'");
  return q_value(g, v.values, *c);
}

namespace detail {

template <class Num>
std::vector<Num> backup(const StochasticGame<Num>& g, const std::vector<Num>& v) {
  std::vector<Num> out(g.num_states(), NumTraits<Num>::zero());
  for (StateId s = 0; s < g.num_states(); ++s) {
    bool first = true;
    for (const auto& c : g.choices(s)) {
      Num q = q_value(g, v, c);
      if (first || (g.is_system(s) ? q > out[s] : q < out[s])) out[s] = q;
      first = false;
    }
  }
  return out;
}

template <class Num>
Num sup_distance(const std::vector<Num>& a, const std::vector<Num>& b) {
  Num r = NumTraits<Num>::zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    Num d = NumTraits<Num>::abs(Num(a[i] - b[i]));
    if (d > r) r = d;
  }
  return r;
}

template <class Num>
Num mdp_q(const MdpChoice<Num>& c, const Num& gamma, const std::vector<Num>& v) {
  Num q = c.reward;
  for (const auto& [t, p] : c.successors) q += gamma * p * v[t];
  return q;
}

template <class Num>
bool strictly_better(const Num& candidate, const Num& incumbent, bool maximize) {
  if constexpr (NumTraits<Num>::exact) {
    return maximize ? candidate > incumbent : candidate < incumbent;
  } else {
    Num slack = 1e-12 * (1.0 + NumTraits<Num>::abs(incumbent));
    return maximize ? candidate > incumbent + slack : candidate < incumbent - slack;
  }
}

}  // namespace detail

/// One application of the max/min discounted operator.
template <class Num>
ValueFunction<Num> bellman_backup(const StochasticGame<Num>& g, const ValueFunction<Num>& v) {
  return {detail::backup(g, v.values), Num(g.gamma() * v.error_bound)};
}

/// Environment-minimising solution of an EnvMDP, with the deterministic
/// best-response choice index at every state (0 at system states).
template <class Num>
struct MdpSolution {
  ValueFunction<Num> value;
  std::vector<std::size_t> choice;
};

template <class Num>
MdpSolution<Num> solve_env_mdp(const EnvMDP<Num>& mdp, const Num& gamma, const SolveMode& mode,
                               std::vector<Num>* residuals = nullptr) {
  using Traits = NumTraits<Num>;
  const std::size_t n = mdp.num_states();
  MdpSolution<Num> sol{{std::vector<Num>(n, Traits::zero()), Traits::zero()}, std::vector<std::size_t>(n, 0)};
  const Num one_minus = Traits::one() - gamma;

  auto greedy = [&](const std::vector<Num>& v) {
    for (StateId s = 0; s < n; ++s) {
      std::size_t best = sol.choice[s];
      Num best_q = detail::mdp_q(mdp.choices[s][best], gamma, v);
      for (std::size_t ci = 0; ci < mdp.choices[s].size(); ++ci) {
        Num q = detail::mdp_q(mdp.choices[s][ci], gamma, v);
        if (detail::strictly_better(q, best_q, false)) {
          best = ci;
          best_q = q;
        }
      }
      sol.choice[s] = best;
    }
  };

  if (mode.kind == SolveKind::exact) {
    for (;;) {
      std::vector<std::vector<std::pair<std::size_t, Num>>> rows(n);
      std::vector<Num> reward(n);
      for (StateId s = 0; s < n; ++s) {
        const auto& c = mdp.choices[s][sol.choice[s]];
        rows[s] = c.successors;
        reward[s] = c.reward;
      }
      sol.value.values = discounted_chain_value(rows, reward, gamma);
      std::vector<std::size_t> before = sol.choice;
      greedy(sol.value.values);
      if (before == sol.choice) break;
    }
    if constexpr (!Traits::exact) {
      std::vector<Num> next(n);
      for (StateId s = 0; s < n; ++s) next[s] = detail::mdp_q(mdp.choices[s][sol.choice[s]], gamma, sol.value.values);
      sol.value.error_bound = detail::sup_distance(next, sol.value.values) / one_minus;
    }
    return sol;
  }

  const Num tol = Traits::from_double(mode.tolerance);
  std::vector<Num> v(n, Traits::zero());
  Num bound = Traits::zero();
  for (std::size_t sweep = 0; sweep < mode.max_sweeps; ++sweep) {
    std::vector<Num> next(n);
    for (StateId s = 0; s < n; ++s) {
      bool first = true;
      for (const auto& c : mdp.choices[s]) {
        Num q = detail::mdp_q(c, gamma, v);
        if (first || q < next[s]) next[s] = q;
        first = false;
      }
    }
    Num r = detail::sup_distance(next, v);
    if (residuals) residuals->push_back(r);
    v = std::move(next);
    bound = r * gamma / one_minus;
    if (bound <= tol) break;
  }
  // If the sweep budget ran out, the reported bound still holds but exceeds tol.
  sol.value = {v, bound};
  greedy(v);
  return sol;
}

/// Optimal values of the zero-sum discounted game (system maximises).
template <class Num>
ValueFunction<Num> solve_values(const StochasticGame<Num>& g, const SolveMode& mode,
                                std::vector<Num>* residuals = nullptr) {
  using Traits = NumTraits<Num>;
  const std::size_t n = g.num_states();
  const Num one_minus = Traits::one() - g.gamma();

  if (mode.kind == SolveKind::iterative) {
    const Num tol = Traits::from_double(mode.tolerance);
    std::vector<Num> v(n, Traits::zero());
    Num bound = Traits::zero();
    for (std::size_t sweep = 0; sweep < mode.max_sweeps; ++sweep) {
      std::vector<Num> next = detail::backup(g, v);
      Num r = detail::sup_distance(next, v);
      if (residuals) residuals->push_back(r);
      v = std::move(next);
      bound = r * g.gamma() / one_minus;
      if (bound <= tol) break;
    }
    return {std::move(v), bound};
  }

  // Strategy improvement for the system; the environment best-responds
  // exactly. Incumbent actions are kept unless strictly improved.
  std::vector<ActionId> pick(n, 0);
  for (StateId s = 0; s < n; ++s)
    if (g.is_system(s) && !g.choices(s).empty()) pick[s] = g.choices(s).front().action;
  for (;;) {
    MdpSolution<Num> sol = solve_env_mdp(fix_system_strategy(g, deterministic_strategy(g, pick)), g.gamma(), mode);
    const std::vector<Num>& v = sol.value.values;
    bool improved = false;
    for (StateId s = 0; s < n; ++s) {
      if (!g.is_system(s)) continue;
      Num best_q = q_value(g, v, *g.find_choice(s, pick[s]));
      for (const auto& c : g.choices(s)) {
        Num q = q_value(g, v, c);
        if (detail::strictly_better(q, best_q, true)) {
          best_q = q;
          pick[s] = c.action;
          improved = true;
        }
      }
    }
    if (!improved) {
      ValueFunction<Num> out{v, Traits::zero()};
      if constexpr (!Traits::exact) out.error_bound = detail::sup_distance(detail::backup(g, v), v) / one_minus;
      return out;
    }
  }
}

/// Default A* tolerance: 0 for exact scalars, ten times the value error bound
/// otherwise.
template <class Num>
Num default_action_tolerance(const ValueFunction<Num>& v) {
  if constexpr (NumTraits<Num>::exact) return NumTraits<Num>::zero();
  else return Num(10 * v.error_bound);
}

/// A*(s) = { a : q(s, a) >= max_b q(s, b) - tolerance } at system states.
template <class Num>
OptimalActionSets<Num> optimal_action_sets(const StochasticGame<Num>& g, const ValueFunction<Num>& v,
                                           const Num& tolerance) {
  OptimalActionSets<Num> out{std::vector<std::vector<ActionId>>(g.num_states()), tolerance};
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (!g.is_system(s) || g.choices(s).empty()) continue;
    std::vector<Num> q;
    for (const auto& c : g.choices(s)) q.push_back(q_value(g, v.values, c));
    Num best = *std::max_element(q.begin(), q.end());
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] >= best - tolerance) out.sets[s].push_back(g.choices(s)[i].action);
  }
  return out;
}

template <class Num>
OptimalActionSets<Num> optimal_action_sets(const StochasticGame<Num>& g, const ValueFunction<Num>& v) {
  return optimal_action_sets(g, v, default_action_tolerance(v));
}

/// Worst-case discounted value of a fixed memoryless system strategy.
template <class Num>
ValueFunction<Num> strategy_value(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma,
                                  const SolveMode& mode) {
  return solve_env_mdp(fix_system_strategy(g, sigma), g.gamma(), mode).value;
}

/// Finite-memory strategies are evaluated on the memory product; the value of
/// s is that of (s, m0).
template <class Num>
ValueFunction<Num> strategy_value(const StochasticGame<Num>& g, const FiniteMemoryStrategy<Num>& sigma,
                                  const SolveMode& mode) {
  ProductGame<Num> prod = product_with_memory(g, sigma);
  ValueFunction<Num> inner = strategy_value(prod.game, prod.strategy, mode);
  ValueFunction<Num> out{std::vector<Num>(g.num_states()), inner.error_bound};
  for (StateId s = 0; s < g.num_states(); ++s) out.values[s] = inner.values[prod.at(s, sigma.initial_memory())];
  return out;
}

}  // namespace rabin
