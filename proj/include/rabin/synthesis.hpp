#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabin/game.hpp"
#include "rabin/qualitative.hpp"
#include "rabin/quantitative.hpp"
#include "rabin/strategy.hpp"

namespace rabin {

/// The input game violates the standing assumption I subset of W_as.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ResultKind { optimal_memoryless, epsilon_memoryless, epsilon_finite_memory, none };

inline const char* to_string(ResultKind k) {
  switch (k) {
    case ResultKind::optimal_memoryless: return "optimal_memoryless";
    case ResultKind::epsilon_memoryless: return "epsilon_memoryless";
    case ResultKind::epsilon_finite_memory: return "epsilon_finite_memory";
    case ResultKind::none: return "none";
  }
  return "none";
}

/// Outcome of a synthesis run. Strategies and certificates refer to `game`,
/// the input restricted to its almost-sure winning region.
template <class Num>
struct SynthesisResult {
  ResultKind kind = ResultKind::none;
  StochasticGame<Num> game;
  std::optional<MemorylessStrategy<Num>> memoryless;
  std::optional<FiniteMemoryStrategy<Num>> finite_memory;
  ValueFunction<Num> optimal_values;
  OptimalActionSets<Num> optimal_actions;
  std::optional<ValueFunction<Num>> strategy_values;
  std::optional<ASVerdict> verdict;  // checked at the initial states of `game`
  std::optional<Num> epsilon;
  std::optional<Num> split_prob;
  std::optional<std::size_t> memory_bound;
};

struct SynthesisOptions {
  SolveMode mode = SolveMode::exact();
  RegionOptions region;
};

/// The split game used to bound the mass of suboptimal actions.
///
/// Every system state s keeps the single action `hat_action`, moving to N(s)
/// with probability p and to O(s) otherwise. N(s) offers every original
/// action of s, O(s) only the optimal ones; both then follow the original
/// transitions. Original ids are preserved; the new states are appended and
/// belong to no Rabin set.
template <class Num>
struct HatGame {
  StochasticGame<Num> game;
  std::vector<StateId> n_map;  // original system state -> N(s); unused elsewhere
  std::vector<StateId> o_map;  // original system state -> O(s)
  Num split_prob{};
  ActionId hat_action = 0;
  OptimalActionSets<Num> optimal;
  std::size_t base_states = 0;
};

/// Bar-G: system actions restricted to A*, then cut to the part reachable
/// from the initial states.
template <class Num>
StochasticGame<Num> restrict_to_optimal(const StochasticGame<Num>& g, const OptimalActionSets<Num>& optimal) {
  return prune_unreachable(filter_actions(g, [&](StateId s, ActionId a) {
    return g.is_environment(s) || optimal.contains(s, a);
  }));
}

/// Largest probability of suboptimal actions that keeps a memoryless
/// strategy epsilon-optimal: (1-g)^2 e / (Rmax - e (1-g) g), clamped to 1.
template <class Num>
Num suboptimality_budget(const Num& epsilon, const Num& gamma, const Num& r_max) {
  using Traits = NumTraits<Num>;
  if (!(r_max > 0)) return Traits::one();
  Num one_minus = Traits::one() - gamma;
  Num denominator = r_max - epsilon * one_minus * gamma;
  if (!(denominator > 0)) return Traits::one();
  Num p = one_minus * one_minus * epsilon / denominator;
  return p > Traits::one() ? Traits::one() : p;
}

/// Smallest C with gamma^C * Rmax / (1 - gamma) < epsilon, and 0 when
/// epsilon (1 - gamma) >= Rmax.
template <class Num>
std::size_t memory_bound(const Num& epsilon, const Num& gamma, const Num& r_max) {
  using Traits = NumTraits<Num>;
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  const Num target = epsilon * (Traits::one() - gamma);
  if (target >= r_max) return 0;
  std::size_t c = 0;
  Num scaled = r_max;
  while (!(scaled < target)) {
    scaled *= gamma;
    ++c;
  }
  return c;
}

namespace detail {

inline std::string fresh_name(std::string base, const std::function<bool(const std::string&)>& taken) {
  while (taken(base)) base += "'";
  return base;
}

}  // namespace detail

template <class Num>
HatGame<Num> build_hat_game(const StochasticGame<Num>& g, const OptimalActionSets<Num>& optimal, const Num& p) {
  using Traits = NumTraits<Num>;
  if (!(p > 0) || p > Traits::one()) throw std::invalid_argument("split probability must lie in (0,1]");
  const std::size_t n = g.num_states();

  std::vector<std::string> names = g.state_names();
  std::vector<bool> system(n);
  for (StateId s = 0; s < n; ++s) system[s] = g.is_system(s);
  std::set<std::string> taken(names.begin(), names.end());
  auto is_taken = [&](const std::string& x) { return taken.count(x) > 0; };

  HatGame<Num> hat;
  hat.n_map.assign(n, static_cast<StateId>(-1));
  hat.o_map.assign(n, static_cast<StateId>(-1));
  for (StateId s = 0; s < n; ++s) {
    if (!g.is_system(s)) continue;
    for (auto* map : {&hat.n_map, &hat.o_map}) {
      std::string name = detail::fresh_name((map == &hat.n_map ? "N(" : "O(") + g.state_name(s) + ")", is_taken);
      taken.insert(name);
      (*map)[s] = names.size();
      names.push_back(name);
      system.push_back(true);
    }
  }
  const std::size_t total = names.size();

  std::vector<std::string> actions = g.action_names();
  std::set<std::string> action_taken(actions.begin(), actions.end());
  const ActionId hat_action = actions.size();
  actions.push_back(detail::fresh_name("hat", [&](const std::string& x) { return action_taken.count(x) > 0; }));

  std::vector<std::vector<Choice<Num>>> choices(total);
  for (StateId s = 0; s < n; ++s) {
    if (!g.is_system(s)) {
      choices[s] = g.choices(s);
      continue;
    }
    Choice<Num> split{hat_action, {{hat.n_map[s], p, Traits::zero()}}};
    if (p < Traits::one()) split.outcomes.push_back({hat.o_map[s], Traits::one() - p, Traits::zero()});
    choices[s].push_back(std::move(split));
    choices[hat.n_map[s]] = g.choices(s);
    for (const auto& c : g.choices(s))
      if (optimal.contains(s, c.action)) choices[hat.o_map[s]].push_back(c);
  }

  StateSet init(total);
  for (StateId s : g.initial().members()) init.insert(s);
  std::vector<RabinPair> pairs;
  for (const auto& pr : g.rabin_pairs()) {
    RabinPair q{StateSet(total), StateSet(total)};
    for (StateId s : pr.avoid.members()) q.avoid.insert(s);
    for (StateId s : pr.reach.members()) q.reach.insert(s);
    pairs.push_back(std::move(q));
  }

  hat.game = StochasticGame<Num>(std::move(names), std::move(system), std::move(init), std::move(actions),
                                 std::move(choices), std::move(pairs), g.gamma());
  hat.split_prob = p;
  hat.hat_action = hat_action;
  hat.optimal = optimal;
  hat.base_states = n;
  return hat;
}

/// Collapses a split-game strategy back onto the original system states:
/// optimal actions receive p * N-mass + (1-p) * O-mass, the rest p * N-mass.
template <class Num>
MemorylessStrategy<Num> project_hat_strategy(const MemorylessStrategy<Num>& hat_sigma, const HatGame<Num>& hat) {
  using Traits = NumTraits<Num>;
  const Num& p = hat.split_prob;
  MemorylessStrategy<Num> out(hat.base_states);
  for (StateId s = 0; s < hat.base_states; ++s) {
    if (!hat.game.is_system(s)) continue;
    std::map<ActionId, Num> mass;
    for (const auto& [a, w] : hat_sigma.at(hat.n_map[s])) mass[a] += p * w;
    if (p < Traits::one())
      for (const auto& [a, w] : hat_sigma.at(hat.o_map[s]))
        if (hat.optimal.contains(s, a)) mass[a] += (Traits::one() - p) * w;
    ActionDistribution<Num> dist(mass.begin(), mass.end());
    out.set(s, std::move(dist));
  }
  return out;
}

/// Plays `optimal` for the first C visits to system states, then `winning`
/// forever. Memory counts system-state visits and saturates at C.
template <class Num>
FiniteMemoryStrategy<Num> finite_mem_strategy(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& winning,
                                              const MemorylessStrategy<Num>& optimal, std::size_t c) {
  FiniteMemoryStrategy<Num> out(g.num_states(), c + 1, 0);
  for (StateId s = 0; s < g.num_states(); ++s) {
    for (std::size_t m = 0; m <= c; ++m) {
      out.set_update(s, m, (m < c && g.is_system(s)) ? m + 1 : m);
      if (g.is_system(s)) out.set(s, m, m >= c ? winning.at(s) : optimal.at(s));
    }
  }
  return out;
}

/// Deterministic optimal strategy: least optimal action at each system state.
template <class Num>
MemorylessStrategy<Num> least_optimal_strategy(const StochasticGame<Num>& g, const OptimalActionSets<Num>& optimal) {
  MemorylessStrategy<Num> out(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s) && !optimal.at(s).empty()) out.set_deterministic(s, optimal.at(s).front());
  return out;
}

/// True iff some memoryless almost-sure winning strategy of `g` can take an
/// optimal action at every system state, decided on the split game with
/// p = 1/2 (the answer depends only on supports).
template <class Num>
bool memoryless_condition_holds(const StochasticGame<Num>& g, const OptimalActionSets<Num>& optimal,
                                const RegionOptions& opts = {}) {
  Num half = NumTraits<Num>::one() / 2;
  HatGame<Num> hat = build_hat_game(g, optimal, half);
  return hat.game.initial().is_subset_of(almost_sure_region(hat.game, opts).region);
}

template <class Num>
bool memoryless_condition_holds(const StochasticGame<Num>& g, const SolveMode& mode = SolveMode::exact(),
                                const RegionOptions& opts = {}) {
  return memoryless_condition_holds(g, optimal_action_sets(g, solve_values(g, mode)), opts);
}

namespace detail {

template <class Num>
struct RestrictedGame {
  StochasticGame<Num> game;
  MemorylessStrategy<Num> witness;  // on `game`
};

inline RegionOptions allow_empty(RegionOptions opts) {
  opts.require_nonempty = false;
  return opts;
}

/// G = G_in restricted to its almost-sure region, with the region witness
/// carried over by name.
template <class Num>
RestrictedGame<Num> restrict_to_region(const StochasticGame<Num>& g_in, const RegionOptions& opts) {
  ASRegionResult<Num> as = almost_sure_region(g_in, opts);
  if (as.region.empty() || !g_in.initial().is_subset_of(as.region)) {
    std::string missing;
    for (StateId s : (g_in.initial() - as.region).members()) missing += (missing.empty() ? "" : ", ") + g_in.state_name(s);
    throw PreconditionError("initial states outside the almost-sure winning region: " + missing);
  }
  StochasticGame<Num> g = induced_subgame(g_in, as.region);
  MemorylessStrategy<Num> witness(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) witness.set(s, as.witness.at(g_in.state_id(g.state_name(s))));
  return {std::move(g), std::move(witness)};
}

}  // namespace detail

/// Optimal almost-sure winning synthesis. Returns a deterministic memoryless
/// strategy optimal among almost-sure winning ones, or kind `none` when the
/// optimal-action game admits no almost-sure win from the initial states.
template <class Num>
SynthesisResult<Num> solve_optimal(const StochasticGame<Num>& g_in, const SynthesisOptions& opts = {}) {
  detail::RestrictedGame<Num> rg = detail::restrict_to_region(g_in, opts.region);
  const StochasticGame<Num>& g = rg.game;

  SynthesisResult<Num> res;
  res.game = g;
  res.optimal_values = solve_values(g, opts.mode);
  res.optimal_actions = optimal_action_sets(g, res.optimal_values);

  StochasticGame<Num> bar = restrict_to_optimal(g, res.optimal_actions);
  ASRegionResult<Num> bar_as = almost_sure_region(bar, detail::allow_empty(opts.region));
  if (!bar.initial().is_subset_of(bar_as.region)) {
    res.kind = ResultKind::none;
    return res;
  }

  MemorylessStrategy<Num> sigma = least_optimal_strategy(g, res.optimal_actions);
  for (StateId s = 0; s < bar.num_states(); ++s)
    if (bar.is_system(s)) sigma.set(g.state_id(bar.state_name(s)), bar_as.witness.at(s));

  res.kind = ResultKind::optimal_memoryless;
  res.strategy_values = strategy_value(g, sigma, opts.mode);
  res.verdict = verify_almost_sure(g, sigma, g.initial());
  res.memoryless = std::move(sigma);
  return res;
}

/// Epsilon-optimal almost-sure winning synthesis. Memoryless when the split
/// game is won from every initial state, finite-memory otherwise.
template <class Num>
SynthesisResult<Num> solve_epsilon(const StochasticGame<Num>& g_in, const Num& epsilon,
                                   const SynthesisOptions& opts = {}) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  detail::RestrictedGame<Num> rg = detail::restrict_to_region(g_in, opts.region);
  const StochasticGame<Num>& g = rg.game;

  SynthesisResult<Num> res;
  res.game = g;
  res.epsilon = epsilon;
  res.optimal_values = solve_values(g, opts.mode);
  res.optimal_actions = optimal_action_sets(g, res.optimal_values);

  Num p = suboptimality_budget(epsilon, g.gamma(), g.max_reward());
  HatGame<Num> hat = build_hat_game(g, res.optimal_actions, p);
  ASRegionResult<Num> hat_as = almost_sure_region(hat.game, detail::allow_empty(opts.region));

  if (hat.game.initial().is_subset_of(hat_as.region)) {
    MemorylessStrategy<Num> sigma = project_hat_strategy(hat_as.witness, hat);
    res.kind = ResultKind::epsilon_memoryless;
    res.split_prob = p;
    res.strategy_values = strategy_value(g, sigma, opts.mode);
    res.verdict = verify_almost_sure(g, sigma, g.initial());
    res.memoryless = std::move(sigma);
    return res;
  }

  std::size_t c = memory_bound(epsilon, g.gamma(), g.max_reward());
  FiniteMemoryStrategy<Num> sigma =
      finite_mem_strategy(g, rg.witness, least_optimal_strategy(g, res.optimal_actions), c);
  res.kind = ResultKind::epsilon_finite_memory;
  res.memory_bound = c;
  res.strategy_values = strategy_value(g, sigma, opts.mode);
  res.verdict = verify_almost_sure(g, sigma, g.initial());
  res.finite_memory = std::move(sigma);
  return res;
}

}  // namespace rabin
