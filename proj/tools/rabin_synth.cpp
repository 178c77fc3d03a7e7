// Command-line front end: rabin-synth <command> --game FILE [options]
//
// Exit codes: 0 success, 1 malformed input, 2 precondition violated.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rabin/rabin.hpp"

namespace {

using rabin::io::json;

struct Config {
  std::string game_path;
  std::string gamma;
  std::string epsilon;
  double tol = 1e-9;
  std::string mode = "exact";
  std::string engine = "default";
  std::uint64_t seed = 0;
  std::size_t horizon = 200;
  std::size_t runs = 1000;
  std::string out;
  std::string strategy_path;
  std::string start;
  std::string env = "best_response";
  std::size_t max_strategies = 1'000'000;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Config& cfg, const json& j) {
  if (cfg.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw InputError("cannot write '" + cfg.out + "'");
  f << j.dump(2) << "\n";
}

template <class Num>
rabin::StochasticGame<Num> load(const Config& cfg) {
  std::optional<Num> gamma;
  if (!cfg.gamma.empty()) {
    try {
      gamma = rabin::parse_number<Num>(cfg.gamma);
    } catch (const rabin::NumberFormatError& e) {
      throw InputError(std::string("--gamma: ") + e.what());
    }
  }
  auto g = rabin::io::load_game<Num>(cfg.game_path, gamma);
  auto report = rabin::validate_game(g);
  if (!report.ok()) {
    std::string msg = "invalid game:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw InputError(msg);
  }
  return g;
}

template <class Num>
rabin::StateSet start_states(const rabin::StochasticGame<Num>& g, const Config& cfg) {
  if (cfg.start.empty()) return g.initial();
  rabin::StateSet out(g.num_states());
  std::size_t pos = 0;
  while (pos <= cfg.start.size()) {
    std::size_t comma = cfg.start.find(',', pos);
    if (comma == std::string::npos) comma = cfg.start.size();
    std::string name = cfg.start.substr(pos, comma - pos);
    auto s = g.find_state(name);
    if (!s) throw InputError("--start: unknown state '" + name + "'");
    out.insert(*s);
    pos = comma + 1;
  }
  return out;
}

template <class Num>
rabin::SystemStrategy<Num> load_strategy(const rabin::StochasticGame<Num>& g, const Config& cfg) {
  if (cfg.strategy_path.empty()) throw InputError("--strategy is required");
  auto sigma = rabin::io::load_strategy(g, cfg.strategy_path);
  auto problems = std::visit([&](const auto& s) { return rabin::validate_strategy(g, s); }, sigma);
  if (!problems.empty()) throw InputError("invalid strategy: " + problems.front());
  return sigma;
}

rabin::SolveMode solve_mode(const Config& cfg) {
  return cfg.mode == "exact" ? rabin::SolveMode::exact() : rabin::SolveMode::iterative(cfg.tol);
}

template <class Num>
int validate(const Config& cfg) {
  auto g = rabin::io::load_game<Num>(cfg.game_path, cfg.gamma.empty() ? std::nullopt
                                                                         : std::optional(rabin::parse_number<Num>(cfg.gamma)));
  auto report = rabin::validate_game(g);
  json j{{"valid", report.ok()}, {"violations", report.violations}};
  if (!report.ok()) j["error"] = "game violates " + std::to_string(report.violations.size()) + " invariant(s)";
  emit(cfg, j);
  return report.ok() ? 0 : 1;
}

template <class Num>
int region(const Config& cfg) {
  auto g = load<Num>(cfg);
  if (cfg.engine == "oracle") {
    rabin::oracle::OracleBudget budget;
    budget.max_strategies = cfg.max_strategies;
    emit(cfg, rabin::io::region_to_json(g, rabin::oracle::oracle_as_region(g, budget)));
  } else {
    auto r = rabin::almost_sure_region(g, {cfg.max_strategies, false});
    emit(cfg, rabin::io::region_to_json(g, r.region, std::optional(r.witness)));
  }
  return 0;
}

template <class Num>
json oracle_check(const rabin::StochasticGame<Num>& g, const rabin::SynthesisResult<Num>& r) {
  rabin::oracle::OracleBudget budget;
  bool region_ok = rabin::oracle::oracle_as_region(g) == rabin::almost_sure_region(g).region;
  auto ov = rabin::oracle::oracle_exact_values(r.game, budget);
  bool values_ok = true;
  for (rabin::StateId s = 0; s < r.game.num_states(); ++s) {
    Num gap = rabin::NumTraits<Num>::abs(Num(ov.values[s] - r.optimal_values.values[s]));
    Num slack = r.optimal_values.error_bound;
    if constexpr (!rabin::NumTraits<Num>::exact) slack += 1e-9 * (1 + rabin::NumTraits<Num>::abs(ov.values[s]));
    values_ok = values_ok && gap <= slack;
  }
  return {{"region_agrees", region_ok}, {"values_agree", values_ok}};
}

template <class Num>
int solve(const Config& cfg, bool epsilon_variant) {
  auto g = load<Num>(cfg);
  rabin::SynthesisOptions opts{solve_mode(cfg), {cfg.max_strategies, true}};
  rabin::SynthesisResult<Num> r;
  if (epsilon_variant) {
    if (cfg.epsilon.empty()) throw InputError("--epsilon is required for solve-epsilon");
    Num eps;
    try {
      eps = rabin::parse_number<Num>(cfg.epsilon);
    } catch (const rabin::NumberFormatError& e) {
      throw InputError(std::string("--epsilon: ") + e.what());
    }
    if (!(eps > rabin::NumTraits<Num>::zero())) throw InputError("--epsilon must be positive");
    r = rabin::solve_epsilon(g, eps, opts);
  } else {
    r = rabin::solve_optimal(g, opts);
  }
  json j = rabin::io::result_to_json(r);
  if (cfg.engine == "oracle") j["oracle_check"] = oracle_check(g, r);
  emit(cfg, j);
  return 0;
}

template <class Num>
int verify(const Config& cfg) {
  auto g = load<Num>(cfg);
  auto sigma = load_strategy(g, cfg);
  rabin::StateSet check = start_states(g, cfg);
  if (const auto* m = std::get_if<rabin::MemorylessStrategy<Num>>(&sigma)) {
    if (cfg.engine == "oracle") {
      auto win = rabin::oracle::oracle_winning_states(g, *m);
      bool all = true;
      for (rabin::StateId s : check.members()) all = all && win[s];
      json per = json::object();
      for (rabin::StateId s = 0; s < g.num_states(); ++s) per[g.state_name(s)] = static_cast<bool>(win[s]);
      emit(cfg, {{"winning", all}, {"bad_ec", nullptr}, {"per_state", per}});
    } else {
      emit(cfg, rabin::io::verdict_to_json(g, rabin::verify_almost_sure(g, *m, check)));
    }
  } else {
    const auto& fm = std::get<rabin::FiniteMemoryStrategy<Num>>(sigma);
    auto prod = rabin::product_with_memory(g, fm);
    emit(cfg, rabin::io::verdict_to_json(g, rabin::verify_almost_sure(g, fm, check), &prod.game));
  }
  return 0;
}

template <class Num>
int evaluate(const Config& cfg) {
  auto g = load<Num>(cfg);
  auto sigma = load_strategy(g, cfg);
  auto v = std::visit([&](const auto& s) { return rabin::strategy_value(g, s, solve_mode(cfg)); }, sigma);
  emit(cfg, rabin::io::values_to_json(g, v));
  return 0;
}

template <class Num>
int simulate(const Config& cfg) {
  auto g = load<Num>(cfg);
  auto sigma = load_strategy(g, cfg);
  rabin::StateSet starts = start_states(g, cfg);
  if (starts.size() != 1 && !cfg.start.empty()) throw InputError("--start must name one state for simulate");
  rabin::StateId s0 = starts.members().front();

  rabin::EnvPolicy<Num> env;
  if (cfg.env == "best_response") {
    env.kind = rabin::EnvPolicyKind::best_response;
  } else if (cfg.env == "uniform") {
    env.kind = rabin::EnvPolicyKind::uniform;
  } else {
    // A path to a memoryless strategy file giving environment choices.
    auto doc = rabin::io::detail::parse_text(rabin::io::detail::read_file(cfg.env), cfg.env);
    env.kind = rabin::EnvPolicyKind::given;
    env.strategy = rabin::MemorylessStrategy<Num>(g.num_states());
    const json& choice = rabin::io::detail::require(doc, "choice", "");
    for (const auto& [name, d] : choice.items()) {
      auto s = g.find_state(name);
      if (!s) throw InputError("--env: unknown state '" + name + "'");
      env.strategy.set(*s, rabin::io::distribution_from_json(g, d, "choice." + name));
    }
  }
  auto stats = rabin::simulate(g, sigma, env, s0, cfg.horizon, cfg.seed, cfg.runs);
  json j = rabin::io::simulation_to_json(g.state_names(), g.action_names(), stats);
  j["start"] = g.state_name(s0);
  j["seed"] = cfg.seed;
  if (env.kind == rabin::EnvPolicyKind::best_response) {
    auto v = std::visit([&](const auto& s) { return rabin::strategy_value(g, s, solve_mode(cfg)); }, sigma);
    j["strategy_value"] = rabin::io::number_to_json(v.values[s0]);
  }
  emit(cfg, j);
  return 0;
}

template <class Num>
int dispatch(const std::string& command, const Config& cfg) {
  if (command == "validate") return validate<Num>(cfg);
  if (command == "region") return region<Num>(cfg);
  if (command == "solve-optimal") return solve<Num>(cfg, false);
  if (command == "solve-epsilon") return solve<Num>(cfg, true);
  if (command == "verify") return verify<Num>(cfg);
  if (command == "evaluate") return evaluate<Num>(cfg);
  if (command == "simulate") return simulate<Num>(cfg);
  throw InputError("unknown command '" + command + "'");
}

void fail(const std::string& msg) { std::cout << json{{"error", msg}}.dump() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy synthesis for stochastic Rabin games with discounted rewards"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--game", cfg.game_path, "game JSON file")->required();
    sub->add_option("--gamma", cfg.gamma, "discount factor override, decimal or p/q");
    sub->add_option("--mode", cfg.mode, "exact (rationals, policy iteration) or iterative (floating, value iteration)")
        ->check(CLI::IsMember({"exact", "iterative"}));
    sub->add_option("--tol", cfg.tol, "value iteration stopping tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--engine", cfg.engine, "default or oracle (brute force cross-check)")
        ->check(CLI::IsMember({"default", "oracle"}));
    sub->add_option("--max-strategies", cfg.max_strategies, "strategy enumeration cap");
    sub->add_option("--out", cfg.out, "write JSON here instead of standard output");
  };
  auto add_strategy = [&](CLI::App* sub) {
    sub->add_option("--strategy", cfg.strategy_path, "strategy JSON file")->required();
    sub->add_option("--start", cfg.start, "comma-separated states (default: initial states)");
  };

  add_common(app.add_subcommand("validate", "check game well-formedness"));
  add_common(app.add_subcommand("region", "almost-sure winning region and witness"));
  add_common(app.add_subcommand("solve-optimal", "optimal almost-sure winning strategy"));
  auto* eps = app.add_subcommand("solve-epsilon", "epsilon-optimal almost-sure winning strategy");
  add_common(eps);
  eps->add_option("--epsilon", cfg.epsilon, "optimality gap, decimal or p/q")->required();
  auto* ver = app.add_subcommand("verify", "almost-sure check of a strategy");
  add_common(ver);
  add_strategy(ver);
  auto* ev = app.add_subcommand("evaluate", "worst-case discounted value of a strategy");
  add_common(ev);
  add_strategy(ev);
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo runs of a strategy");
  add_common(sim);
  add_strategy(sim);
  sim->add_option("--seed", cfg.seed, "base seed; run i uses seed + i");
  sim->add_option("--horizon", cfg.horizon, "steps per run")->check(CLI::PositiveNumber);
  sim->add_option("--runs", cfg.runs, "number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--env", cfg.env, "best_response, uniform, or a strategy file for the environment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail(e.what());
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.mode == "exact") return dispatch<rabin::Rational>(command, cfg);
    return dispatch<double>(command, cfg);
  } catch (const rabin::PreconditionError& e) {
    fail(e.what());
    return 2;
  } catch (const rabin::RegionEmptyError& e) {
    fail(e.what());
    return 2;
  } catch (const rabin::EnumerationLimitError& e) {
    fail(e.what());
    return 2;
  } catch (const rabin::oracle::BudgetExceeded& e) {
    fail(e.what());
    return 2;
  } catch (const std::exception& e) {
    fail(e.what());
    return 1;
  }
}
