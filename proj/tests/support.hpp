#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rabin/rabin.hpp"

namespace testing_support {

using rabin::Rational;

/// a/b in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational frac(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

inline std::string game_path(const std::string& name) { return std::string(RABIN_GAMES_DIR) + "/" + name; }

template <class Num = Rational>
rabin::StochasticGame<Num> corpus(const std::string& name) {
  return rabin::io::load_game<Num>(game_path(name + ".json"));
}

struct RandomGameShape {
  std::size_t min_states = 2;
  std::size_t max_states = 6;
  std::size_t max_actions = 3;
  std::size_t max_successors = 3;
  std::size_t max_pairs = 2;
  int max_reward = 3;
  std::size_t trap_one_in = 2;  // chance 1/trap_one_in that a state i > 0 is absorbing
  std::vector<std::string> gammas = {"1/2", "2/3", "3/4", "4/5", "9/10"};
};

inline Rational random_weight(std::mt19937_64& rng, int hi) {
  return Rational(std::uniform_int_distribution<int>(1, hi)(rng));
}

/// Splits 1 into k positive rationals with small denominators.
inline std::vector<Rational> random_distribution(std::mt19937_64& rng, std::size_t k) {
  std::vector<Rational> w;
  Rational total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    w.push_back(random_weight(rng, 6));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Random valid game. Some states are absorbing traps; every other state
/// gets random successors, and each state i > 0 is attached as a successor
/// of some earlier non-trap state, so everything is reachable from s0.
inline rabin::StochasticGame<Rational> random_game(std::mt19937_64& rng, const RandomGameShape& shape = {}) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t n = pick(shape.min_states, shape.max_states);
  auto name = [](std::size_t i) { return "s" + std::to_string(i); };
  rabin::GameBuilder<Rational> b;
  for (std::size_t i = 0; i < n; ++i) b.state(name(i), pick(0, 1) == 1);
  b.initial(name(0));
  b.gamma(rabin::parse_number<Rational>(shape.gammas[pick(0, shape.gammas.size() - 1)]));

  std::vector<bool> trap(n, false);
  std::vector<std::vector<std::vector<std::size_t>>> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    trap[i] = i > 0 && shape.trap_one_in > 0 && pick(1, shape.trap_one_in) == 1;
    if (trap[i]) {
      targets[i] = {{i}};
      continue;
    }
    targets[i].resize(pick(1, shape.max_actions));
    for (auto& ts : targets[i]) {
      const std::size_t k = pick(1, std::min(shape.max_successors, n));
      while (ts.size() < k) {
        std::size_t t = pick(0, n - 1);
        if (std::find(ts.begin(), ts.end(), t) == ts.end()) ts.push_back(t);
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<std::size_t> parents;
    for (std::size_t j = 0; j < i; ++j)
      if (!trap[j]) parents.push_back(j);
    auto& acts = targets[parents[pick(0, parents.size() - 1)]];
    auto& ts = acts[pick(0, acts.size() - 1)];
    if (std::find(ts.begin(), ts.end(), i) == ts.end()) ts.push_back(i);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < targets[i].size(); ++a) {
      const auto& ts = targets[i][a];
      auto probs = random_distribution(rng, ts.size());
      for (std::size_t j = 0; j < ts.size(); ++j) {
        Rational r = 0;
        if (pick(0, 2) != 0)
          r = Rational(static_cast<long>(pick(0, static_cast<std::size_t>(shape.max_reward)))) /
              static_cast<long>(1 + pick(0, 1));
        b.transition(name(i), "a" + std::to_string(a), name(ts[j]), probs[j], r);
      }
    }
  }

  const std::size_t pairs = pick(1, shape.max_pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    std::vector<std::string> e, f;
    for (std::size_t i = 0; i < n; ++i) {
      switch (pick(0, 5)) {
        case 0: e.push_back(name(i)); break;
        case 1:
        case 2: f.push_back(name(i)); break;
        default: break;
      }
    }
    b.rabin_pair(e, f);
  }
  return b.build();
}

/// Random memoryless strategy with the given support at each system state
/// and strictly positive probabilities on it.
inline rabin::MemorylessStrategy<Rational> random_on_support(const rabin::StochasticGame<Rational>& g,
                                                             const std::vector<std::vector<rabin::ActionId>>& support,
                                                             std::mt19937_64& rng) {
  rabin::MemorylessStrategy<Rational> sigma(g.num_states());
  for (rabin::StateId s = 0; s < g.num_states(); ++s) {
    if (!g.is_system(s)) continue;
    auto probs = random_distribution(rng, support[s].size());
    rabin::ActionDistribution<Rational> d;
    for (std::size_t i = 0; i < support[s].size(); ++i) d.emplace_back(support[s][i], probs[i]);
    sigma.set(s, d);
  }
  return sigma;
}

inline std::vector<std::vector<rabin::ActionId>> random_support(const rabin::StochasticGame<Rational>& g,
                                                                std::mt19937_64& rng) {
  std::vector<std::vector<rabin::ActionId>> out(g.num_states());
  for (rabin::StateId s = 0; s < g.num_states(); ++s) {
    if (!g.is_system(s)) continue;
    auto acts = g.available(s);
    for (auto a : acts)
      if (std::uniform_int_distribution<int>(0, 1)(rng)) out[s].push_back(a);
    if (out[s].empty()) out[s].push_back(acts[std::uniform_int_distribution<std::size_t>(0, acts.size() - 1)(rng)]);
  }
  return out;
}

inline bool all_at_least(const std::vector<Rational>& v, const std::vector<Rational>& ref, const Rational& slack) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < ref[i] - slack) return false;
  return true;
}

}  // namespace testing_support
