#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hvacrl/harness.hpp"
#include "test_support.hpp"

using namespace hvacrl;
using hvacrl::testing::read_file;
using hvacrl::testing::TempDir;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;

  std::filesystem::path output_dir() const {
    const auto pos = out.rfind("output: ");
    if (pos == std::string::npos) return {};
    const auto end = out.find('\n', pos);
    return out.substr(pos + 8, end - pos - 8);
  }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "hvacrl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) f.push_back(cur);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

const std::vector<std::string> kQuick{"--synthetic-hours", "48", "--episodes", "2"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(CliSimulate, WarehouseDayTrace) {
  TempDir dir("sim");
  const auto trace = dir.path() / "trace.csv";
  const auto r = run({"simulate", "--env", "warehouse", "--weather", "synthetic:hot", "--action", "5", "--hours",
                      "24", "--dt", "900", "--out", trace.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(trace);
  std::string header;
  std::getline(in, header);
  const auto cols = split_line(header);
  EXPECT_EQ(cols.front(), "time_s");
  EXPECT_EQ(cols.back(), "reward");
  EXPECT_EQ(cols.size(), 2u + 3 + 6 + 2);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto f = split_line(line);
    ASSERT_EQ(f.size(), cols.size());
    EXPECT_LE(std::stod(f.back()), 0.0);
    EXPECT_EQ(f[cols.size() - 3], "");  // bulk storage has no cooling setpoint
    ++rows;
    EXPECT_DOUBLE_EQ(std::stod(f[0]), 900.0 * rows);
  }
  EXPECT_EQ(rows, 96);
}

TEST(CliSimulate, DatacenterAndErrors) {
  TempDir dir("sim2");
  const auto trace = dir.path() / "dc.csv";
  EXPECT_EQ(run({"simulate", "--env", "datacenter", "--hours", "2", "--out", trace.string()}).code, kExitOk);
  EXPECT_EQ(run({"simulate", "--action", "11", "--out", trace.string()}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--env", "igloo", "--out", trace.string()}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--weather", (dir.path() / "none.epw").string(), "--out", trace.string()}).code,
            kExitIo);
  EXPECT_EQ(run({"simulate", "--weather", hvacrl::testing::fixture("short_row.epw").string(), "--out",
                 trace.string()})
                .code,
            kExitIo);
}

TEST(CliTrain, DeterministicResults) {
  TempDir dir("train");
  const auto args = with({"train", "--agent", "qlearning", "--seed", "3", "--out", dir.path().string()}, kQuick);
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  ASSERT_NE(a.output_dir(), b.output_dir());
  EXPECT_EQ(read_file(a.output_dir() / "results.json"), read_file(b.output_dir() / "results.json"));
  EXPECT_TRUE(std::filesystem::exists(a.output_dir() / "agent.qtable"));
  EXPECT_TRUE(std::filesystem::exists(a.output_dir() / "config.json"));

  const auto ev = run(with({"evaluate", "--agent-artifact", (a.output_dir() / "agent.qtable").string(), "--seed",
                            "3", "--out", dir.path().string()},
                           kQuick));
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const auto trained = read_results_csv(a.output_dir() / "results.csv");
  const auto evaluated = read_results_csv(ev.output_dir() / "results.csv");
  EXPECT_EQ(trained[0].energy_kwh, evaluated[0].energy_kwh);
  EXPECT_EQ(trained[0].violation_pct, evaluated[0].violation_pct);
}

TEST(CliTrain, FlagsOverrideConfigFile) {
  TempDir dir("prec");
  const auto cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"agent": "fixed", "seed": 11, "synthetic_hours": 48, "reward": {"omega": 0.25}})";
  const auto r = run({"train", "--config", cfg.string(), "--seed", "4", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(read_file(r.output_dir() / "config.json"));
  EXPECT_EQ(j["seed"], 4);
  EXPECT_EQ(j["reward"]["omega"], 0.25);
  EXPECT_EQ(j["agent"], "fixed");
}

TEST(CliTrain, ConfigErrorsExitTwo) {
  TempDir dir("bad");
  const auto cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"episodez": 3})";
  EXPECT_EQ(run({"train", "--config", cfg.string(), "--out", dir.path().string()}).code, kExitConfig);
  EXPECT_EQ(run({"train", "--episodes", "0", "--out", dir.path().string()}).code, kExitConfig);
  EXPECT_EQ(run({"train", "--groups", "Energy", "--out", dir.path().string()}).code, kExitConfig);
  EXPECT_EQ(run({"train", "--bogus"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"train", "--config", (dir.path() / "absent.json").string()}).code, kExitIo);
}

TEST(CliAblate, RewardSuiteRows) {
  TempDir dir("abl");
  const auto cfg = dir.path() / "cfg.json";
  std::ofstream(cfg) << R"({"dqn": {"learning_starts": 32}})";
  const auto r = run({"ablate", "--suite", "reward", "--config", cfg.string(), "--out", dir.path().string(),
                      "--synthetic-hours", "30", "--episodes", "1", "--seeds", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = read_results_csv(r.output_dir() / "results.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].omega, 0.25);
  EXPECT_EQ(rows[1].omega, 0.5);
  EXPECT_EQ(rows[2].omega, 0.75);
  for (const auto& row : rows) EXPECT_EQ(row.agent, "dqn");

  const auto rep = run({"report", "--dir", dir.path().string()});
  ASSERT_EQ(rep.code, kExitOk) << rep.err;
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "report.csv"));
  EXPECT_NE(rep.out.find("rows: 3"), std::string::npos);
}

TEST(CliAblate, UnknownSuite) {
  TempDir dir("abl2");
  EXPECT_EQ(run({"ablate", "--suite", "weather", "--out", dir.path().string()}).code, kExitConfig);
}

TEST(CliReport, EmptyDirectoryExitsThree) {
  TempDir dir("empty");
  const auto r = run({"report", "--dir", dir.path().string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliHelp, ListsFlagsWithDefaults) {
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, kExitOk);
  for (const char* sub : {"simulate", "train", "evaluate", "ablate", "report", "schema"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
  const auto train = run({"train", "--help"});
  EXPECT_EQ(train.code, kExitOk);
  for (const char* flag : {"--config", "--out", "--building", "--weather", "--agent", "--episodes", "--seed",
                           "--seeds", "--omega", "--groups", "--tile-width", "--humidity-tile-width",
                           "--fixed-action", "--split", "--dt", "--synthetic-hours"}) {
    EXPECT_NE(train.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(train.out.find("synthetic:hot"), std::string::npos);
  EXPECT_NE(train.out.find("900"), std::string::npos);
  const auto sim = run({"simulate", "--help"});
  for (const char* flag : {"--env", "--weather", "--action", "--hours", "--seed", "--dt", "--out"}) {
    EXPECT_NE(sim.out.find(flag), std::string::npos) << flag;
  }
}

TEST(CliSchema, PrintsJson) {
  const auto r = run({"schema"});
  ASSERT_EQ(r.code, kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["episodes"]["default"], 50);
  EXPECT_EQ(j["reward"]["omega"]["default"], 0.5);
}
