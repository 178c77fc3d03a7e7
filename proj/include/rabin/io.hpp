#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "rabin/game.hpp"
#include "rabin/qualitative.hpp"
#include "rabin/quantitative.hpp"
#include "rabin/sim.hpp"
#include "rabin/strategy.hpp"
#include "rabin/synthesis.hpp"

namespace rabin::io {

using json = nlohmann::ordered_json;

/// Malformed document; the message names the offending field or position.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Numbers

/// Rational output is a "p/q" (or integer) string; floating output a number.
template <class Num>
json number_to_json(const Num& x) {
  if constexpr (NumTraits<Num>::exact) return format_number(x);
  else return x;
}

template <class Num>
Num number_from_json(const json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_number<Num>(j.get<std::string>());
    if (j.is_number_integer()) return parse_number<Num>(std::to_string(j.get<long long>()));
    if (j.is_number_unsigned()) return parse_number<Num>(std::to_string(j.get<unsigned long long>()));
    if (j.is_number_float()) {
      // Shortest round-trip text, so 0.999 reads back as 999/1000.
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, j.get<double>());
      return parse_number<Num>(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    }
  } catch (const NumberFormatError& e) {
    throw ParseError("field '" + field + "': " + e.what());
  }
  throw ParseError("field '" + field + "': expected a number or a \"p/q\" string");
}

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError("field '" + where + "': expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing field '" + (where.empty() ? key : where + "." + key) + "'");
  return *it;
}

inline std::vector<std::string> string_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field '" + field + "': expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ParseError("field '" + field + "[" + std::to_string(i) + "]': expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size() + 1 && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline bool is_index(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Games

template <class Num>
StochasticGame<Num> game_from_json(const json& j, const std::optional<Num>& gamma_override = std::nullopt) {
  GameBuilder<Num> b;
  auto states = detail::string_list(detail::require(j, "states", ""), "states");
  auto system = detail::string_list(detail::require(j, "system_states", ""), "system_states");
  std::set<std::string> sys(system.begin(), system.end());
  std::set<std::string> declared(states.begin(), states.end());
  if (declared.size() != states.size()) throw ParseError("field 'states': duplicate state name");
  for (const auto& s : system)
    if (!declared.count(s)) throw ParseError("field 'system_states': unknown state '" + s + "'");
  for (const auto& s : states) b.state(s, sys.count(s) > 0);

  for (const auto& s : detail::string_list(detail::require(j, "initial", ""), "initial")) {
    if (!declared.count(s)) throw ParseError("field 'initial': unknown state '" + s + "'");
    b.initial(s);
  }

  if (gamma_override) {
    b.gamma(*gamma_override);
  } else {
    auto it = j.find("gamma");
    if (it == j.end() || it->is_null()) throw ParseError("missing field 'gamma' (or pass a discount override)");
    b.gamma(number_from_json<Num>(*it, "gamma"));
  }

  const json& trans = detail::require(j, "transitions", "");
  if (!trans.is_array()) throw ParseError("field 'transitions': expected an array");
  for (std::size_t i = 0; i < trans.size(); ++i) {
    const std::string where = "transitions[" + std::to_string(i) + "]";
    const json& t = trans[i];
    auto str = [&](const char* key) {
      const json& v = detail::require(t, key, where);
      if (!v.is_string()) throw ParseError("field '" + where + "." + key + "': expected a string");
      return v.get<std::string>();
    };
    std::string from = str("from"), action = str("action"), to = str("to");
    for (const auto* s : {&from, &to})
      if (!declared.count(*s)) throw ParseError("field '" + where + "': unknown state '" + *s + "'");
    Num prob = number_from_json<Num>(detail::require(t, "prob", where), where + ".prob");
    Num reward = t.contains("reward") ? number_from_json<Num>(t["reward"], where + ".reward") : NumTraits<Num>::zero();
    try {
      b.transition(from, action, to, prob, reward);
    } catch (const GameFormatError& e) {
      throw ParseError("field '" + where + "': " + e.what());
    }
  }

  const json& pairs = detail::require(j, "rabin_pairs", "");
  if (!pairs.is_array()) throw ParseError("field 'rabin_pairs': expected an array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string where = "rabin_pairs[" + std::to_string(i) + "]";
    auto e = detail::string_list(detail::require(pairs[i], "E", where), where + ".E");
    auto f = detail::string_list(detail::require(pairs[i], "F", where), where + ".F");
    for (const auto* set : {&e, &f})
      for (const auto& s : *set)
        if (!declared.count(s)) throw ParseError("field '" + where + "': unknown state '" + s + "'");
    b.rabin_pair(e, f);
  }
  return b.build();
}

template <class Num>
json game_to_json(const StochasticGame<Num>& g) {
  json j;
  j["states"] = g.state_names();
  json sys = json::array();
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) sys.push_back(g.state_name(s));
  j["system_states"] = sys;
  j["initial"] = g.names_of(g.initial());
  j["gamma"] = number_to_json(g.gamma());
  json trans = json::array();
  for (StateId s = 0; s < g.num_states(); ++s)
    for (const auto& c : g.choices(s))
      for (const auto& t : c.outcomes)
        trans.push_back({{"from", g.state_name(s)},
                         {"action", g.action_name(c.action)},
                         {"to", g.state_name(t.to)},
                         {"prob", number_to_json(t.prob)},
                         {"reward", number_to_json(t.reward)}});
  j["transitions"] = trans;
  json pairs = json::array();
  for (const auto& p : g.rabin_pairs()) pairs.push_back({{"E", g.names_of(p.avoid)}, {"F", g.names_of(p.reach)}});
  j["rabin_pairs"] = pairs;
  return j;
}

template <class Num>
StochasticGame<Num> parse_game(const std::string& text, const std::optional<Num>& gamma_override = std::nullopt,
                               const std::string& source = "<input>") {
  return game_from_json<Num>(detail::parse_text(text, source), gamma_override);
}

template <class Num>
StochasticGame<Num> load_game(const std::string& path, const std::optional<Num>& gamma_override = std::nullopt) {
  return parse_game<Num>(detail::read_file(path), gamma_override, path);
}

template <class Num>
void save_game(const StochasticGame<Num>& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << game_to_json(g).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Strategies

template <class Num>
json distribution_to_json(const StochasticGame<Num>& g, const ActionDistribution<Num>& d) {
  json j = json::object();
  for (const auto& [a, p] : d) j[g.action_name(a)] = number_to_json(p);
  return j;
}

template <class Num>
ActionDistribution<Num> distribution_from_json(const StochasticGame<Num>& g, const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("field '" + where + "': expected an object {action: prob}");
  ActionDistribution<Num> d;
  for (const auto& [name, p] : j.items()) {
    auto a = g.find_action(name);
    if (!a) throw ParseError("field '" + where + "': unknown action '" + name + "'");
    d.emplace_back(*a, number_from_json<Num>(p, where + "." + name));
  }
  return d;
}

template <class Num>
json strategy_to_json(const StochasticGame<Num>& g, const MemorylessStrategy<Num>& sigma) {
  json choice = json::object();
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.is_system(s)) choice[g.state_name(s)] = distribution_to_json(g, sigma.at(s));
  return {{"type", "memoryless"}, {"choice", choice}};
}

template <class Num>
json strategy_to_json(const StochasticGame<Num>& g, const FiniteMemoryStrategy<Num>& sigma) {
  json update = json::object(), choice = json::object();
  for (StateId s = 0; s < g.num_states(); ++s)
    for (std::size_t m = 0; m < sigma.memory_size(); ++m) {
      std::string key = g.state_name(s) + "@" + std::to_string(m);
      update[key] = sigma.update(s, m);
      if (g.is_system(s)) choice[key] = distribution_to_json(g, sigma.at(s, m));
    }
  return {{"type", "finite"},
          {"memory_size", sigma.memory_size()},
          {"initial", sigma.initial_memory()},
          {"update", update},
          {"choice", choice}};
}

/// Reads either strategy form. Missing system states are an error; states
/// absent from `update` keep their memory.
template <class Num>
SystemStrategy<Num> strategy_from_json(const StochasticGame<Num>& g, const json& j) {
  const json& type = detail::require(j, "type", "");
  if (!type.is_string()) throw ParseError("field 'type': expected \"memoryless\" or \"finite\"");
  const json& choice = detail::require(j, "choice", "");
  if (!choice.is_object()) throw ParseError("field 'choice': expected an object");

  if (type == "memoryless") {
    MemorylessStrategy<Num> sigma(g.num_states());
    for (const auto& [name, d] : choice.items()) {
      auto s = g.find_state(name);
      if (!s) throw ParseError("field 'choice': unknown state '" + name + "'");
      sigma.set(*s, distribution_from_json(g, d, "choice." + name));
    }
    for (StateId s = 0; s < g.num_states(); ++s)
      if (g.is_system(s) && sigma.at(s).empty())
        throw ParseError("field 'choice': no distribution for system state '" + g.state_name(s) + "'");
    return sigma;
  }
  if (type != "finite") throw ParseError("field 'type': expected \"memoryless\" or \"finite\"");

  const json& size = detail::require(j, "memory_size", "");
  if (!detail::is_index(size) || size.get<std::size_t>() == 0)
    throw ParseError("field 'memory_size': expected a positive integer");
  std::size_t k = size.get<std::size_t>();
  std::size_t init = 0;
  if (j.contains("initial")) {
    if (!detail::is_index(j["initial"]) || j["initial"].get<std::size_t>() >= k)
      throw ParseError("field 'initial': expected a memory state below memory_size");
    init = j["initial"].get<std::size_t>();
  }
  FiniteMemoryStrategy<Num> sigma(g.num_states(), k, init);
  for (StateId s = 0; s < g.num_states(); ++s)
    for (std::size_t m = 0; m < k; ++m) sigma.set_update(s, m, m);

  auto split = [&](const std::string& key, const std::string& where) {
    auto at = key.rfind('@');
    if (at == std::string::npos) throw ParseError("field '" + where + "': key '" + key + "' is not \"state@memory\"");
    auto s = g.find_state(key.substr(0, at));
    if (!s) throw ParseError("field '" + where + "': unknown state in '" + key + "'");
    std::size_t m = 0;
    const std::string digits = key.substr(at + 1);
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), m);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || m >= k)
      throw ParseError("field '" + where + "': bad memory index in '" + key + "'");
    return std::make_pair(*s, m);
  };
  if (j.contains("update")) {
    if (!j["update"].is_object()) throw ParseError("field 'update': expected an object");
    for (const auto& [key, next] : j["update"].items()) {
      auto [s, m] = split(key, "update");
      if (!detail::is_index(next) || next.template get<std::size_t>() >= k)
        throw ParseError("field 'update." + key + "': expected a memory state below memory_size");
      sigma.set_update(s, m, next.template get<std::size_t>());
    }
  }
  for (const auto& [key, d] : choice.items()) {
    auto [s, m] = split(key, "choice");
    sigma.set(s, m, distribution_from_json(g, d, "choice." + key));
  }
  for (StateId s = 0; s < g.num_states(); ++s)
    for (std::size_t m = 0; m < k; ++m)
      if (g.is_system(s) && sigma.at(s, m).empty())
        throw ParseError("field 'choice': no distribution for '" + g.state_name(s) + "@" + std::to_string(m) + "'");
  return sigma;
}

template <class Num>
SystemStrategy<Num> load_strategy(const StochasticGame<Num>& g, const std::string& path) {
  return strategy_from_json(g, detail::parse_text(detail::read_file(path), path));
}

template <class Num>
json strategy_to_json(const StochasticGame<Num>& g, const SystemStrategy<Num>& sigma) {
  return std::visit([&](const auto& s) { return strategy_to_json(g, s); }, sigma);
}

// ---------------------------------------------------------------------------
// Results

template <class Num>
json values_to_json(const StochasticGame<Num>& g, const ValueFunction<Num>& v) {
  json vals = json::object();
  for (StateId s = 0; s < g.num_states(); ++s) vals[g.state_name(s)] = number_to_json(v.values[s]);
  return {{"values", vals}, {"error_bound", number_to_json(v.error_bound)}};
}

/// `bad_ec` ids index `g`; pass the product game for finite-memory verdicts.
template <class Num>
json verdict_to_json(const StochasticGame<Num>& g, const ASVerdict& v, const StochasticGame<Num>* ec_game = nullptr) {
  const StochasticGame<Num>& ecg = ec_game ? *ec_game : g;
  json j;
  j["winning"] = v.winning;
  j["bad_ec"] = v.bad_ec ? json(ecg.names_of(v.bad_ec->states)) : json(nullptr);
  json per = json::object();
  for (StateId s = 0; s < g.num_states(); ++s) per[g.state_name(s)] = static_cast<bool>(v.per_state_winning[s]);
  j["per_state"] = per;
  return j;
}

template <class Num>
json region_to_json(const StochasticGame<Num>& g, const StateSet& region,
                    const std::optional<MemorylessStrategy<Num>>& witness = std::nullopt) {
  json j;
  j["region"] = g.names_of(region);
  if (witness) j["witness"] = strategy_to_json(g, *witness);
  return j;
}

template <class Num>
json result_to_json(const SynthesisResult<Num>& r) {
  const auto& g = r.game;
  json j;
  j["kind"] = to_string(r.kind);
  if (r.memoryless)
    j["strategy"] = strategy_to_json(g, *r.memoryless);
  else if (r.finite_memory)
    j["strategy"] = strategy_to_json(g, *r.finite_memory);
  else
    j["strategy"] = nullptr;
  if (r.epsilon) j["epsilon"] = number_to_json(*r.epsilon);
  if (r.split_prob) j["p"] = number_to_json(*r.split_prob);
  if (r.memory_bound) j["C"] = *r.memory_bound;
  json cert;
  cert["optimal_values"] = values_to_json(g, r.optimal_values);
  json astar = json::object();
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (!g.is_system(s)) continue;
    json acts = json::array();
    for (ActionId a : r.optimal_actions.at(s)) acts.push_back(g.action_name(a));
    astar[g.state_name(s)] = acts;
  }
  cert["optimal_actions"] = astar;
  if (r.strategy_values) cert["strategy_values"] = values_to_json(g, *r.strategy_values);
  if (r.verdict) {
    if (r.finite_memory) {
      ProductGame<Num> prod = product_with_memory(g, *r.finite_memory);
      cert["almost_sure"] = verdict_to_json(g, *r.verdict, &prod.game);
    } else {
      cert["almost_sure"] = verdict_to_json(g, *r.verdict);
    }
  }
  j["region_game_states"] = g.state_names();
  j["certificates"] = cert;
  return j;
}

inline json simulation_to_json(const std::vector<std::string>& states, const std::vector<std::string>& actions,
                               const SimulationStats& st) {
  json visits = json::object(), freq = json::object();
  for (std::size_t s = 0; s < states.size(); ++s) {
    visits[states[s]] = st.visits[s];
    json row = json::object();
    for (std::size_t a = 0; a < actions.size(); ++a)
      if (st.action_counts[s][a] > 0) row[actions[a]] = st.action_counts[s][a];
    if (!row.empty()) freq[states[s]] = row;
  }
  return {{"mean_return", st.mean_return},
          {"truncation_bound", st.truncation_bound},
          {"runs", st.runs},
          {"horizon", st.horizon},
          {"visits", visits},
          {"action_counts", freq}};
}

}  // namespace rabin::io
