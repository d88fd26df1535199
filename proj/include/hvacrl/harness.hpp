#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hvacrl/dqn.hpp"
#include "hvacrl/env.hpp"
#include "hvacrl/tabular.hpp"

namespace hvacrl {

enum class AgentKind { Fixed, Random, QLearning, Dqn };

std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& text);

struct ExperimentConfig {
  BuildingKind building = BuildingKind::Warehouse;
  std::string weather = "synthetic:hot";
  std::int64_t synthetic_hours = 8760;
  AgentKind agent = AgentKind::QLearning;
  int episodes = 50;
  std::uint64_t seed = 0;
  int seeds = 3;  // consecutive seeds per ablation setting
  double split_fraction = 0.8;
  double dt = 900.0;
  RewardParams reward;
  /// Unset: Env for qlearning, all groups otherwise.
  std::optional<GroupSet> observation_groups;
  double tile_width = 5.0;            // degC per temperature tile
  double humidity_tile_width = 10.0;  // % per humidity tile
  int fixed_action = 7;
  QLearningConfig qlearning;
  DQNConfig dqn;
  nlohmann::json building_overrides = nlohmann::json::object();
  std::string output_dir;

  void validate() const;
  GroupSet effective_groups() const;
};

struct Metrics {
  double energy_kwh = 0.0;
  double violation_pct = 0.0;
  double mean_eval_reward = 0.0;
  std::vector<double> episode_returns;  // mean per-step reward per training episode
};

struct ResultRecord {
  std::string run;
  ExperimentConfig config;
  Metrics metrics;
  double wall_clock_s = 0.0;
  std::string code_version;
};

/// Trained policy in one of its two representations.
struct TabularPolicy {
  QTable table;
  TileCodingSpec tiles;
};
struct NetworkPolicy {
  MLPParams params;
};
using AgentArtifact = std::variant<TabularPolicy, NetworkPolicy>;

struct TrainOutput {
  AgentArtifact artifact;
  std::vector<double> episode_returns;
};

const char* code_version();

/// Joules accumulated at constant step length, as kWh.
double energy_kwh(std::span<const double> power_w, double dt);
/// Share of steps flagged as violating, in percent.
double violation_pct(std::int64_t violating_steps, std::int64_t total_steps);

/// Writes `agent.qtable` (text) or `agent.dqn` (binary) into `dir`; returns the path.
std::filesystem::path save_artifact(const AgentArtifact& artifact, const std::filesystem::path& dir);
/// Detects the format from the file contents.
AgentArtifact load_artifact(const std::filesystem::path& file);

/// Building with config overrides applied.
BuildingModel build_model(const ExperimentConfig& cfg);
/// Train/eval weather segments for the config's source and seed.
WeatherSplit load_split(const ExperimentConfig& cfg);

TrainOutput train(const ExperimentConfig& cfg);
Metrics evaluate(const AgentArtifact& artifact, const ExperimentConfig& cfg);
Metrics run_fixed_baseline(const ExperimentConfig& cfg);
Metrics run_random_baseline(const ExperimentConfig& cfg);

/// Train (if the agent learns) and evaluate one configuration.
ResultRecord run_experiment(const ExperimentConfig& cfg);

/// Runs configs on up to `jobs` worker threads; output order matches input.
std::vector<ResultRecord> run_all(const std::vector<ExperimentConfig>& configs, int jobs = 1);

/// Config lists for the ablation suites; `cfg.seeds` copies per setting.
std::vector<ExperimentConfig> observation_ablation_configs(const ExperimentConfig& cfg);
std::vector<ExperimentConfig> reward_ablation_configs(const ExperimentConfig& cfg);
std::vector<ExperimentConfig> tile_ablation_configs(const ExperimentConfig& cfg);
/// Fixed, qlearning and dqn on the same setup.
std::vector<ExperimentConfig> baseline_comparison_configs(const ExperimentConfig& cfg);

std::vector<ResultRecord> ablate_observations(const ExperimentConfig& cfg, int jobs = 1);
std::vector<ResultRecord> ablate_reward_weights(const ExperimentConfig& cfg, int jobs = 1);
std::vector<ResultRecord> ablate_tile_density(const ExperimentConfig& cfg, int jobs = 1);
std::vector<ResultRecord> compare_baselines(const ExperimentConfig& cfg, int jobs = 1);

/// Deterministic run label built from the distinguishing config fields.
std::string run_name(const ExperimentConfig& cfg);
/// FNV-1a over the canonical JSON of the config.
std::string config_hash(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Results files

/// results.csv, results.json, timings.csv and curves/<run>.csv under `dir`.
void write_results(const std::vector<ResultRecord>& records, const std::filesystem::path& dir);

inline constexpr const char* kResultsCsvHeader =
    "config_hash,agent,building,omega,groups,tile_width,seed,energy_kwh,violation_pct";

/// One parsed results.csv row.
struct ResultRow {
  std::string config_hash, agent, building;
  double omega = 0.0;
  std::string groups;
  double tile_width = 0.0;
  std::uint64_t seed = 0;
  double energy_kwh = 0.0;
  double violation_pct = 0.0;
};

std::vector<ResultRow> read_results_csv(const std::filesystem::path& file);

/// Rows grouped by everything except seed, with medians.
struct SummaryRow {
  std::string agent, building, groups;
  double omega = 0.0;
  double tile_width = 0.0;
  std::size_t runs = 0;
  double median_energy_kwh = 0.0;
  double median_violation_pct = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Config files

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Strict: unknown keys raise InvalidConfig.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);
/// Every config key with its default value and a one-line description.
nlohmann::json config_schema();

}  // namespace hvacrl
