#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rabin/graph.hpp"
#include "rabin/number.hpp"

namespace rabin {

/// Dense row-major square system A x = b solved by Gaussian elimination.
/// Exact scalars pivot on the first nonzero entry; floating scalars use
/// partial pivoting.
template <class Num>
std::vector<Num> solve_linear(std::vector<std::vector<Num>> a, std::vector<Num> b) {
  using Traits = NumTraits<Num>;
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    if constexpr (Traits::exact) {
      for (std::size_t r = col; r < n; ++r)
        if (a[r][col] != 0) {
          pivot = r;
          break;
        }
    } else {
      Num best = Traits::zero();
      for (std::size_t r = col; r < n; ++r)
        if (Traits::abs(a[r][col]) > best) {
          best = Traits::abs(a[r][col]);
          pivot = r;
        }
    }
    if (pivot == n) throw std::domain_error("singular linear system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Num factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Num> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Discounted value of a Markov chain: V = r + gamma * P V.
/// `rows[s]` lists (successor, probability) pairs. The chain is split into
/// strongly connected blocks solved downstream-first, so only block-sized
/// dense systems are ever formed.
template <class Num>
std::vector<Num> discounted_chain_value(const std::vector<std::vector<std::pair<std::size_t, Num>>>& rows,
                                        const std::vector<Num>& reward, const Num& gamma) {
  using Traits = NumTraits<Num>;
  const std::size_t n = rows.size();
  std::vector<long> comp = detail::strongly_connected(n, StateSet::full(n), [&](StateId s, std::vector<StateId>& out) {
    for (const auto& [t, p] : rows[s]) out.push_back(t);
  });
  long blocks = 0;
  for (long c : comp) blocks = std::max(blocks, c + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(blocks));
  for (std::size_t s = 0; s < n; ++s) members[static_cast<std::size_t>(comp[s])].push_back(s);

  std::vector<Num> value(n, Traits::zero());
  std::vector<std::size_t> local(n, 0);
  // Tarjan numbers sink components first.
  for (const auto& block : members) {
    const std::size_t k = block.size();
    for (std::size_t i = 0; i < k; ++i) local[block[i]] = i;
    std::vector<std::vector<Num>> a(k, std::vector<Num>(k, Traits::zero()));
    std::vector<Num> b(k, Traits::zero());
    const long c = comp[block.front()];
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t s = block[i];
      a[i][i] += Traits::one();
      b[i] = reward[s];
      for (const auto& [t, p] : rows[s]) {
        if (comp[t] == c)
          a[i][local[t]] -= gamma * p;
        else
          b[i] += gamma * p * value[t];
      }
    }
    std::vector<Num> x = solve_linear(std::move(a), std::move(b));
    for (std::size_t i = 0; i < k; ++i) value[block[i]] = x[i];
  }
  return value;
}

}  // namespace rabin
