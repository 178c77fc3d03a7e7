#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  json doc;
};

std::string games(const std::string& name) { return std::string(RABIN_GAMES_DIR) + "/" + name; }

Run run(const std::string& args) {
  Run r;
  FILE* pipe = popen((std::string(RABIN_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.doc = json::parse(r.out, nullptr, false);
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

const char* kAlwaysA1 = R"({"type": "memoryless", "choice": {"q1": {"a1": 1}}})";

}  // namespace

TEST(Cli, Validate) {
  auto r = run("validate --game " + games("fig1.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.doc["valid"], true);
  auto bad = write_temp("bad_mass.json", R"({"states": ["x"], "system_states": ["x"], "initial": ["x"],
    "gamma": "1/2", "transitions": [{"from": "x", "action": "a", "to": "x", "prob": "1/2"}], "rabin_pairs": []})");
  auto v = run("validate --game " + bad);
  EXPECT_EQ(v.code, 1);
  EXPECT_EQ(v.doc["valid"], false);
  EXPECT_FALSE(v.doc["violations"].empty());
}

TEST(Cli, RegionBothEngines) {
  for (const char* engine : {"default", "oracle"}) {
    auto r = run("region --game " + games("fig2.json") + " --engine " + engine);
    EXPECT_EQ(r.code, 0) << engine;
    EXPECT_EQ(r.doc["region"], json({"q0", "q2"})) << engine;
  }
}

TEST(Cli, SolveOptimalFig2) {
  auto r = run("solve-optimal --game " + games("fig2.json") + " --gamma 0.9 --mode exact");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.doc["kind"], "optimal_memoryless");
  EXPECT_EQ(r.doc["certificates"]["optimal_values"]["values"]["q0"], "0");
  EXPECT_EQ(r.doc["strategy"]["choice"]["q0"], json({{"a1", "1"}}));
}

TEST(Cli, SolveEpsilonFig3) {
  auto r = run("solve-epsilon --game " + games("fig3.json") + " --gamma 0.5 --epsilon 1");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.doc["kind"], "epsilon_finite_memory");
  EXPECT_EQ(r.doc["C"], 3);
  EXPECT_EQ(r.doc["certificates"]["strategy_values"]["values"]["s0"], "3/2");
  EXPECT_EQ(r.doc["certificates"]["almost_sure"]["winning"], true);
}

TEST(Cli, SolveIterativeWithOracleCheck) {
  auto r = run("solve-epsilon --game " + games("fig1.json") + " --epsilon 1 --mode iterative --tol 1e-9 --engine oracle");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.doc["kind"], "epsilon_memoryless");
  EXPECT_TRUE(r.doc["p"].is_number());
  EXPECT_EQ(r.doc["oracle_check"]["region_agrees"], true);
  EXPECT_EQ(r.doc["oracle_check"]["values_agree"], true);
}

TEST(Cli, VerifyEvaluateSimulate) {
  auto strat = write_temp("always_a1.json", kAlwaysA1);
  auto v = run("verify --game " + games("fig1.json") + " --strategy " + strat);
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.doc["winning"], false);
  EXPECT_EQ(v.doc["bad_ec"], json({"q1"}));

  auto o = run("verify --game " + games("fig1.json") + " --strategy " + strat + " --engine oracle");
  EXPECT_EQ(o.doc["winning"], false);

  auto e = run("evaluate --game " + games("fig1.json") + " --strategy " + strat);
  EXPECT_EQ(e.doc["values"]["q1"], "10");

  std::string sim = "simulate --game " + games("fig1.json") + " --strategy " + strat + " --runs 50 --horizon 40 --seed 9";
  auto s1 = run(sim), s2 = run(sim);
  EXPECT_EQ(s1.code, 0);
  EXPECT_EQ(s1.doc["mean_return"], s2.doc["mean_return"]);
  EXPECT_EQ(s1.doc["runs"], 50);
  auto su = run(sim + " --env uniform --start q1");
  EXPECT_EQ(su.doc["start"], "q1");
}

TEST(Cli, OutFile) {
  std::string path = ::testing::TempDir() + "region_out.json";
  std::remove(path.c_str());
  auto r = run("region --game " + games("fig3.json") + " --out " + path);
  EXPECT_EQ(r.code, 0);
  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  EXPECT_EQ(json::parse(in)["region"], json({"s0", "s1"}));
}

TEST(Cli, PreconditionExitsTwo) {
  auto g = write_temp("lost.json", R"({"states": ["x"], "system_states": ["x"], "initial": ["x"], "gamma": "1/2",
    "transitions": [{"from": "x", "action": "a", "to": "x", "prob": 1, "reward": 1}],
    "rabin_pairs": [{"E": ["x"], "F": []}]})");
  for (const char* cmd : {"solve-optimal", "solve-epsilon --epsilon 1"}) {
    auto r = run(std::string(cmd) + " --game " + g);
    EXPECT_EQ(r.code, 2) << cmd;
    EXPECT_TRUE(r.doc.contains("error")) << cmd;
  }
}

TEST(Cli, MalformedInputExitsOne) {
  auto broken = write_temp("broken.json", "{\"states\": [\"x\",\n}");
  auto r = run("region --game " + broken);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.doc["error"].get<std::string>().find(":2:"), std::string::npos);

  auto g = nlohmann::json::parse(std::ifstream(games("fig1.json")));
  g.erase("rabin_pairs");
  auto missing = write_temp("missing_pairs.json", g.dump());
  auto m = run("region --game " + missing);
  EXPECT_EQ(m.code, 1);
  EXPECT_NE(m.doc["error"].get<std::string>().find("rabin_pairs"), std::string::npos);

  EXPECT_EQ(run("solve-epsilon --game " + games("fig1.json")).code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  auto bad_strat = write_temp("bad_strategy.json", R"({"type": "memoryless", "choice": {"q1": {"zz": 1}}})");
  EXPECT_EQ(run("verify --game " + games("fig1.json") + " --strategy " + bad_strat).code, 1);
}
