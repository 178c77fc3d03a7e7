#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace rabin {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Membership mask over the states [0, universe) of one game.
class StateSet {
public:
  StateSet() = default;
  explicit StateSet(std::size_t universe) : bits_(universe, false) {}
  StateSet(std::size_t universe, std::initializer_list<StateId> members) : bits_(universe, false) {
    for (StateId s : members) insert(s);
  }

  static StateSet full(std::size_t universe) {
    StateSet r(universe);
    r.bits_.assign(universe, true);
    r.count_ = universe;
    return r;
  }

  std::size_t universe() const { return bits_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(StateId s) const { return s < bits_.size() && bits_[s]; }

  void insert(StateId s) {
    if (!bits_[s]) {
      bits_[s] = true;
      ++count_;
    }
  }
  void erase(StateId s) {
    if (bits_[s]) {
      bits_[s] = false;
      --count_;
    }
  }

  /// Members in increasing id order.
  std::vector<StateId> members() const {
    std::vector<StateId> out;
    out.reserve(count_);
    for (StateId s = 0; s < bits_.size(); ++s)
      if (bits_[s]) out.push_back(s);
    return out;
  }

  bool is_subset_of(const StateSet& other) const {
    for (StateId s = 0; s < bits_.size(); ++s)
      if (bits_[s] && !other.contains(s)) return false;
    return true;
  }

  bool intersects(const StateSet& other) const {
    for (StateId s = 0; s < bits_.size(); ++s)
      if (bits_[s] && other.contains(s)) return true;
    return false;
  }

  StateSet& operator|=(const StateSet& other) {
    for (StateId s = 0; s < other.bits_.size(); ++s)
      if (other.bits_[s]) insert(s);
    return *this;
  }

  StateSet& operator-=(const StateSet& other) {
    for (StateId s = 0; s < bits_.size(); ++s)
      if (bits_[s] && other.contains(s)) erase(s);
    return *this;
  }

  StateSet& operator&=(const StateSet& other) {
    for (StateId s = 0; s < bits_.size(); ++s)
      if (bits_[s] && !other.contains(s)) erase(s);
    return *this;
  }

  friend bool operator==(const StateSet& a, const StateSet& b) { return a.bits_ == b.bits_; }

private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

inline StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
inline StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
inline StateSet operator-(StateSet a, const StateSet& b) { return a -= b; }

}  // namespace rabin
