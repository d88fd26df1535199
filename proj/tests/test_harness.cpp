#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "hvacrl/error.hpp"
#include "hvacrl/harness.hpp"
#include "test_support.hpp"

using namespace hvacrl;
using hvacrl::testing::read_file;
using hvacrl::testing::TempDir;

namespace {

/// Small, fast configuration for plumbing tests.
ExperimentConfig tiny(AgentKind agent, std::uint64_t seed = 0) {
  ExperimentConfig c;
  c.agent = agent;
  c.synthetic_hours = 60;
  c.seeds = 1;
  c.episodes = 2;
  c.seed = seed;
  c.dqn.learning_starts = 64;
  c.dqn.target_sync_interval = 50;
  return c;
}

/// Weather file with a constant comfortable climate.
std::filesystem::path mild_epw(const TempDir& dir, std::size_t hours) {
  std::vector<WeatherRecord> recs(hours);
  for (std::size_t h = 0; h < hours; ++h) recs[h] = {static_cast<std::int64_t>(h), 22.0, 50.0, 2.0, 180.0, 0.0, 0.0};
  const auto p = dir.path() / "mild.epw";
  std::ofstream(p) << hvacrl::testing::serialize_epw(WeatherSeries(recs, "mild"));
  return p;
}

}  // namespace

TEST(MetricsMath, EnergyUnitConversion) {
  const std::vector<double> p(4, 10000.0);
  EXPECT_DOUBLE_EQ(energy_kwh(p, 900.0), 10.0);
  EXPECT_DOUBLE_EQ(energy_kwh({}, 900.0), 0.0);
}

TEST(MetricsMath, ViolationPercent) {
  EXPECT_DOUBLE_EQ(violation_pct(7, 100), 7.0);
  EXPECT_DOUBLE_EQ(violation_pct(0, 3), 0.0);
  EXPECT_THROW(violation_pct(0, 0), Error);
}

TEST(MetricsMath, Median) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0}), 2.5);
  EXPECT_THROW(median({}), Error);
}

TEST(Config, ValidateRejectsBadValues) {
  auto expect_invalid = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    try {
      c.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == Errc::InvalidConfig || e.code() == Errc::EnvGroupMissing);
    }
  };
  expect_invalid([](ExperimentConfig& c) { c.episodes = 0; });
  expect_invalid([](ExperimentConfig& c) { c.fixed_action = 10; });
  expect_invalid([](ExperimentConfig& c) { c.split_fraction = 1.0; });
  expect_invalid([](ExperimentConfig& c) { c.dt = 0.0; });
  expect_invalid([](ExperimentConfig& c) { c.reward.omega = -0.1; });
  expect_invalid([](ExperimentConfig& c) { c.observation_groups = GroupSet{ObsGroup::Energy}; });
}

TEST(Config, EffectiveGroups) {
  ExperimentConfig c;
  c.agent = AgentKind::QLearning;
  EXPECT_EQ(c.effective_groups(), GroupSet{ObsGroup::Env});
  c.agent = AgentKind::Dqn;
  EXPECT_EQ(c.effective_groups(), GroupSet::all());
  c.observation_groups = GroupSet{ObsGroup::Env, ObsGroup::Energy};
  EXPECT_EQ(c.effective_groups().to_string(), "Env+Energy");
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.building = BuildingKind::Datacenter;
  c.agent = AgentKind::Dqn;
  c.reward.omega = 0.25;
  c.observation_groups = GroupSet{ObsGroup::Env, ObsGroup::Aux};
  c.dqn.hidden = {32, 16};
  c.qlearning.alpha = 0.01;
  c.building_overrides = {{"it_gain", 5000.0}};
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, UnknownKeysRejected) {
  for (const char* text : {R"({"episdoes": 3})", R"({"reward": {"omgea": 0.5}})", R"({"dqn": {"lr": 1e-3, "x": 1}})",
                           R"({"building_overrides": {"zones": {"attic": {}}}})"}) {
    try {
      config_from_json(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidConfig) << text;
    }
  }
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"episodes": "many"})")), Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"observation_groups": "Energy"})")), Error);
}

TEST(Config, PartialFileKeepsDefaults) {
  TempDir dir("cfg");
  const auto p = dir.path() / "c.json";
  std::ofstream(p) << R"({"agent": "dqn", "reward": {"omega": 0.75}})";
  const auto c = load_config_file(p);
  EXPECT_EQ(c.agent, AgentKind::Dqn);
  EXPECT_EQ(c.reward.omega, 0.75);
  EXPECT_EQ(c.reward.lambda_p, 1e-4);
  EXPECT_EQ(c.episodes, 50);
  EXPECT_EQ(c.dqn.target_sync_interval, 10'000);
  try {
    load_config_file(dir.path() / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
}

TEST(Config, SchemaListsEveryKey) {
  const auto schema = config_schema();
  const auto defaults = config_to_json(ExperimentConfig{});
  for (const auto& [key, value] : defaults.items()) EXPECT_TRUE(schema.contains(key)) << key;
}

TEST(Config, BuildingOverrides) {
  ExperimentConfig c;
  c.building_overrides = {{"zones", {{"office", {{"capacitance", 1.0e6}}}}}};
  const auto m = build_model(c);
  EXPECT_EQ(m.zones()[0].capacitance, 1.0e6);
  c.building_overrides = {{"it_gain", 1.0}};
  EXPECT_THROW(build_model(c), Error);
}

TEST(Train, EpisodesZeroRejected) {
  auto c = tiny(AgentKind::QLearning);
  c.episodes = 0;
  try {
    train(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidConfig);
  }
  EXPECT_THROW(train(tiny(AgentKind::Fixed)), Error);
}

TEST(Train, QLearningDeterministic) {
  const auto c = tiny(AgentKind::QLearning, 4);
  const auto a = train(c);
  const auto b = train(c);
  ASSERT_EQ(a.episode_returns.size(), 2u);
  EXPECT_EQ(a.episode_returns, b.episode_returns);
  for (double r : a.episode_returns) EXPECT_LE(r, 0.0);
  const auto& ta = std::get<TabularPolicy>(a.artifact);
  EXPECT_GT(ta.table.visited_states(), 0u);
  EXPECT_NE(train(tiny(AgentKind::QLearning, 5)).episode_returns, a.episode_returns);
}

TEST(Train, QLearningFitsUnderCap) {
  auto c = tiny(AgentKind::QLearning);
  c.qlearning.memory_cap = 1e7;
  c.episodes = 1;
  EXPECT_NO_THROW(train(c));
  c.tile_width = 2.0;
  c.humidity_tile_width = 4.0;
  try {
    train(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StateSpaceTooLarge);
  }
}

TEST(Train, DqnDeterministicAndLearns) {
  const auto c = tiny(AgentKind::Dqn, 2);
  const auto a = train(c);
  const auto b = train(c);
  EXPECT_EQ(a.episode_returns, b.episode_returns);
  const auto& pa = std::get<NetworkPolicy>(a.artifact).params;
  EXPECT_EQ(pa, std::get<NetworkPolicy>(b.artifact).params);
  EXPECT_EQ(pa.input_dim(), 19);
  EXPECT_TRUE(pa.all_finite());
}

TEST(Evaluate, MatchesArtifactRoundTrip) {
  TempDir dir("art");
  for (auto kind : {AgentKind::QLearning, AgentKind::Dqn}) {
    const auto c = tiny(kind, 1);
    const auto out = train(c);
    const auto path = save_artifact(out.artifact, dir.path() / to_string(kind));
    const auto loaded = load_artifact(path);
    const auto m1 = evaluate(out.artifact, c);
    const auto m2 = evaluate(loaded, c);
    EXPECT_EQ(m1.energy_kwh, m2.energy_kwh);
    EXPECT_EQ(m1.violation_pct, m2.violation_pct);
    EXPECT_GE(m1.violation_pct, 0.0);
    EXPECT_LE(m1.violation_pct, 100.0);
    EXPECT_GE(m1.energy_kwh, 0.0);
  }
}

TEST(Evaluate, ArtifactGroupMismatch) {
  auto c = tiny(AgentKind::Dqn);
  const auto out = train(c);
  c.observation_groups = GroupSet{ObsGroup::Env};
  EXPECT_THROW(evaluate(out.artifact, c), Error);
}

TEST(Baselines, FixedComfortableOnMildWeather) {
  TempDir dir("mild");
  auto c = tiny(AgentKind::Fixed);
  c.weather = mild_epw(dir, 24 * 7).string();
  for (auto b : {BuildingKind::Warehouse, BuildingKind::Datacenter}) {
    c.building = b;
    const auto m = run_fixed_baseline(c);
    EXPECT_EQ(m.violation_pct, 0.0);
    EXPECT_GT(m.energy_kwh, 0.0);
    const auto again = run_fixed_baseline(c);
    EXPECT_EQ(m.energy_kwh, again.energy_kwh);
  }
}

TEST(Baselines, RandomIsSeeded) {
  const auto c = tiny(AgentKind::Random, 3);
  EXPECT_EQ(run_random_baseline(c).energy_kwh, run_random_baseline(c).energy_kwh);
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.metrics.episode_returns.empty());
}

TEST(Suites, RunCounts) {
  auto c = tiny(AgentKind::Dqn);
  EXPECT_EQ(observation_ablation_configs(c).size(), 4u);
  c.agent = AgentKind::QLearning;
  EXPECT_EQ(observation_ablation_configs(c).size(), 2u);
  EXPECT_EQ(reward_ablation_configs(c).size(), 3u);
  EXPECT_EQ(tile_ablation_configs(c).size(), 2u);
  EXPECT_EQ(baseline_comparison_configs(c).size(), 3u);
  c.seeds = 3;
  EXPECT_EQ(reward_ablation_configs(c).size(), 9u);
  EXPECT_EQ(tile_ablation_configs(c).size(), 6u);
}

TEST(Suites, SettingsPerRecord) {
  auto c = tiny(AgentKind::Dqn);
  std::set<std::string> groups;
  for (const auto& x : observation_ablation_configs(c)) groups.insert(x.effective_groups().to_string());
  EXPECT_EQ(groups, (std::set<std::string>{"Env", "Env+Energy", "Env+Energy+Action", "Env+Energy+Action+Aux"}));

  std::vector<double> omegas;
  for (const auto& x : reward_ablation_configs(c)) {
    omegas.push_back(x.reward.omega);
    EXPECT_EQ(x.agent, AgentKind::Dqn);
    EXPECT_EQ(x.seed, c.seed);
  }
  EXPECT_EQ(omegas, (std::vector<double>{0.25, 0.5, 0.75}));

  const auto tiles = tile_ablation_configs(c);
  EXPECT_EQ(tiles[0].tile_width, 5.0);
  EXPECT_EQ(tiles[0].humidity_tile_width, 10.0);
  EXPECT_EQ(tiles[1].tile_width, 2.0);
  EXPECT_EQ(tiles[1].humidity_tile_width, 4.0);
  for (const auto& t : tiles) {
    EXPECT_EQ(t.agent, AgentKind::QLearning);
    EXPECT_EQ(t.effective_groups(), GroupSet{ObsGroup::Env});
  }
  const auto base = baseline_comparison_configs(c);
  EXPECT_EQ(base[0].agent, AgentKind::Fixed);
  EXPECT_EQ(base[1].agent, AgentKind::QLearning);
  EXPECT_EQ(base[2].agent, AgentKind::Dqn);
}

TEST(Suites, ParallelMatchesSerial) {
  auto c = tiny(AgentKind::QLearning);
  c.episodes = 1;
  const auto configs = observation_ablation_configs(c);
  const auto serial = run_all(configs, 1);
  const auto parallel = run_all(configs, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].run, parallel[i].run);
    EXPECT_EQ(serial[i].metrics.energy_kwh, parallel[i].metrics.energy_kwh);
  }
}

TEST(Results, FilesAndIdempotence) {
  auto c = tiny(AgentKind::QLearning);
  c.episodes = 3;
  const auto records = run_all(reward_ablation_configs(c));
  TempDir dir("res");
  write_results(records, dir.path());
  const auto rows = read_results_csv(dir.path() / "results.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].omega, 0.25);
  EXPECT_EQ(rows[2].omega, 0.75);
  EXPECT_EQ(rows[1].energy_kwh, records[1].metrics.energy_kwh);
  std::size_t curves = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "curves")) {
    ++curves;
    const auto text = read_file(e.path());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3);
  }
  EXPECT_EQ(curves, 3u);

  const auto json_text = read_file(dir.path() / "results.json");
  const auto j = nlohmann::json::parse(json_text);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["observation_groups"], "Env+Energy+Action+Aux");
  EXPECT_EQ(j[0]["metrics"]["episode_returns"].size(), 3u);
  EXPECT_FALSE(j[0]["config"].contains("output_dir"));

  write_results(records, dir.path());
  EXPECT_EQ(read_file(dir.path() / "results.json"), json_text);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "timings.csv"));
}

TEST(Results, PipelineIsByteDeterministic) {
  auto c = tiny(AgentKind::Dqn, 6);
  TempDir a("det-a"), b("det-b");
  write_results({run_experiment(c)}, a.path());
  c.output_dir = "elsewhere";
  write_results({run_experiment(c)}, b.path());
  EXPECT_EQ(read_file(a.path() / "results.json"), read_file(b.path() / "results.json"));
  EXPECT_EQ(read_file(a.path() / "results.csv"), read_file(b.path() / "results.csv"));
}

TEST(Results, SummaryGroupsBySetting) {
  std::vector<ResultRow> rows;
  for (int s = 0; s < 3; ++s) {
    rows.push_back({"h", "dqn", "warehouse", 0.5, "Env", 5.0, static_cast<std::uint64_t>(s), 10.0 + s, 1.0 * s});
    rows.push_back({"h", "dqn", "warehouse", 0.75, "Env", 5.0, static_cast<std::uint64_t>(s), 5.0 + s, 2.0});
  }
  const auto sum = summarize(rows);
  ASSERT_EQ(sum.size(), 2u);
  EXPECT_EQ(sum[0].runs, 3u);
  EXPECT_EQ(sum[0].median_energy_kwh, 11.0);
  EXPECT_EQ(sum[0].median_violation_pct, 1.0);
  EXPECT_EQ(sum[1].median_energy_kwh, 6.0);
}

TEST(Results, ReadRejectsMalformed) {
  TempDir dir("bad");
  const auto p = dir.path() / "results.csv";
  std::ofstream(p) << "wrong,header\n";
  EXPECT_THROW(read_results_csv(p), Error);
  std::ofstream(p) << kResultsCsvHeader << "\nx,dqn,warehouse,abc,Env,5,0,1,2\n";
  EXPECT_THROW(read_results_csv(p), Error);
}

TEST(Results, RunNamesDistinct) {
  auto c = tiny(AgentKind::QLearning);
  c.seeds = 2;
  std::set<std::string> names;
  for (const auto& x : tile_ablation_configs(c)) names.insert(run_name(x));
  EXPECT_EQ(names.size(), 4u);
}
