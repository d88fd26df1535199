#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hvacrl/thermal.hpp"
#include "hvacrl/weather.hpp"

namespace hvacrl {

inline constexpr int kNumActions = 10;

enum class BuildingKind { Warehouse, Datacenter };

std::string to_string(BuildingKind kind);
BuildingKind parse_building_kind(const std::string& text);

/// Observation variable categories used by the observation-space ablation.
enum class ObsGroup : unsigned { Env = 1u, Energy = 2u, Action = 4u, Aux = 8u };

/// Small bitset over ObsGroup.
class GroupSet {
 public:
  GroupSet() = default;
  GroupSet(std::initializer_list<ObsGroup> groups) {
    for (auto g : groups) insert(g);
  }
  static GroupSet all() { return {ObsGroup::Env, ObsGroup::Energy, ObsGroup::Action, ObsGroup::Aux}; }

  void insert(ObsGroup g) noexcept { bits_ |= static_cast<unsigned>(g); }
  bool contains(ObsGroup g) const noexcept { return (bits_ & static_cast<unsigned>(g)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  unsigned bits() const noexcept { return bits_; }
  bool operator==(const GroupSet&) const = default;

  /// "Env+Energy" style label, in canonical order.
  std::string to_string() const;
  /// Accepts names separated by '+', ',' or whitespace.
  static GroupSet parse(const std::string& text);

 private:
  unsigned bits_ = 0;
};

std::string to_string(ObsGroup g);

/// Physical meaning of an observation variable; drives tile-coding defaults.
enum class VarKind {
  OutdoorTemperature,
  ZoneTemperature,
  Humidity,
  WindSpeed,
  WindDirection,
  Solar,
  Setpoint,
  Power,
  Occupancy,
  Clothing,
  Discomfort,
};

struct ObsVar {
  std::string name;
  std::string unit;
  ObsGroup group;
  VarKind kind;
  double lo;  // normalization range
  double hi;
};

class ObservationSpec {
 public:
  ObservationSpec() = default;
  explicit ObservationSpec(std::vector<ObsVar> vars);

  const std::vector<ObsVar>& vars() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  const ObsVar& operator[](std::size_t i) const { return vars_[i]; }
  /// Index of `name`, or size() if absent.
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<ObsVar> vars_;
};

using Observation = std::vector<double>;

enum class PenaltyForm {
  Literal,   // |T - t_max| + |T - t_min| outside the band
  Distance,  // distance to the nearest band edge
};

struct RewardParams {
  double omega = 0.5;
  double lambda_p = 1.0e-4;  // per W
  double lambda_t = 1.0;     // per degC
  double t_min = 18.0;
  double t_max = 27.0;
  PenaltyForm form = PenaltyForm::Literal;

  void validate() const;
};

/// Per-zone temperature penalty; zero inside [t_min, t_max].
double temperature_violation(double temp, const RewardParams& params);

/// Energy/comfort reward. Always <= 0.
double reward(double p_total, std::span<const double> zone_temps, const RewardParams& params);

class ActionTable {
 public:
  explicit ActionTable(std::vector<SetpointCommand> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const SetpointCommand& decode(int action) const;
  const std::vector<SetpointCommand>& entries() const noexcept { return entries_; }

 private:
  std::vector<SetpointCommand> entries_;
};

ActionTable warehouse_actions();
ActionTable datacenter_actions();

ObservationSpec warehouse_observation_spec(const BuildingModel& model);
ObservationSpec datacenter_observation_spec(const BuildingModel& model);

/// Action whose setpoints the thermostats hold before the first step.
inline constexpr int kInitialAction = 5;

struct StepInfo {
  double p_total = 0.0;
  std::vector<bool> zone_violation;
  double sim_time = 0.0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Building + weather + reward wrapped as an episodic MDP with 10 discrete
/// actions. Single owner; not thread-safe.
class Environment {
 public:
  Environment(BuildingKind kind, BuildingModel model, std::shared_ptr<const WeatherSeries> weather,
              RewardParams reward, double dt, std::uint64_t seed);

  /// Starts a new episode: fresh initial temperatures from the env RNG.
  const Observation& reset();
  StepResult step(int action);
  Observation observe() const;

  BuildingKind kind() const noexcept { return kind_; }
  const BuildingModel& model() const noexcept { return model_; }
  const ActionTable& actions() const noexcept { return actions_; }
  const ObservationSpec& spec() const noexcept { return spec_; }
  const RewardParams& reward_params() const noexcept { return reward_; }
  const BuildingState& state() const noexcept { return state_; }
  const WeatherSeries& weather() const noexcept { return *weather_; }
  double dt() const noexcept { return dt_; }
  std::int64_t episode_length() const noexcept { return episode_length_; }
  std::int64_t steps_taken() const noexcept { return steps_; }
  bool done() const noexcept { return steps_ >= episode_length_; }
  int last_action() const noexcept { return last_action_; }

 private:
  BuildingKind kind_;
  BuildingModel model_;
  std::shared_ptr<const WeatherSeries> weather_;
  RewardParams reward_;
  double dt_;
  ActionTable actions_;
  ObservationSpec spec_;
  std::mt19937_64 rng_;
  std::int64_t episode_length_ = 0;

  BuildingState state_;
  std::int64_t steps_ = 0;
  int last_action_ = kInitialAction;
  double last_p_total_ = 0.0;
  Observation current_;
};

BuildingModel default_model(BuildingKind kind);

Environment make_env(BuildingKind kind, const WeatherSeries& weather, const RewardParams& reward,
                     double dt = 900.0, std::uint64_t seed = 0);

/// Keeps the variables whose group is in `groups`, preserving order.
std::pair<Observation, ObservationSpec> filter_observation(const Observation& obs,
                                                           const ObservationSpec& spec,
                                                           GroupSet groups);
ObservationSpec filter_spec(const ObservationSpec& spec, GroupSet groups);

/// Maps a full observation onto a filtered spec; cheaper than
/// filter_observation when the index list is reused every step.
class ObservationFilter {
 public:
  ObservationFilter(const ObservationSpec& full, GroupSet groups);
  Observation apply(const Observation& obs) const;
  const ObservationSpec& spec() const noexcept { return spec_; }

 private:
  std::vector<std::size_t> indices_;
  ObservationSpec spec_;
};

}  // namespace hvacrl
