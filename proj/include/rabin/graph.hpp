#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "rabin/state_set.hpp"

namespace rabin {

namespace detail {

/// Tarjan's SCCs over `active` states, following `edges(s)`.
/// Returns the component index per state (-1 outside `active`).
inline std::vector<long> strongly_connected(std::size_t n, const StateSet& active,
                                            const std::function<void(StateId, std::vector<StateId>&)>& edges) {
  std::vector<long> comp(n, -1), low(n, 0), order(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<StateId> stack;
  long counter = 0, components = 0;

  struct Frame {
    StateId state;
    std::vector<StateId> succ;
    std::size_t next = 0;
  };
  for (StateId root : active.members()) {
    if (order[root] != -1) continue;
    std::vector<Frame> frames;
    auto open = [&](StateId s) {
      order[s] = low[s] = counter++;
      stack.push_back(s);
      on_stack[s] = true;
      Frame f{s, {}, 0};
      edges(s, f.succ);
      frames.push_back(std::move(f));
    };
    open(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < f.succ.size()) {
        StateId t = f.succ[f.next++];
        if (!active.contains(t)) continue;
        if (order[t] == -1) {
          open(t);
        } else if (on_stack[t]) {
          low[f.state] = std::min(low[f.state], order[t]);
        }
        continue;
      }
      StateId s = f.state;
      if (low[s] == order[s]) {
        StateId t;
        do {
          t = stack.back();
          stack.pop_back();
          on_stack[t] = false;
          comp[t] = components;
        } while (t != s);
        ++components;
      }
      frames.pop_back();
      if (!frames.empty()) low[frames.back().state] = std::min(low[frames.back().state], low[s]);
    }
  }
  return comp;
}

}  // namespace detail

}  // namespace rabin
