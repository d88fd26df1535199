#include "hvacrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hvacrl/error.hpp"

namespace hvacrl {

std::string to_string(BuildingKind kind) {
  return kind == BuildingKind::Warehouse ? "warehouse" : "datacenter";
}

BuildingKind parse_building_kind(const std::string& text) {
  if (text == "warehouse") return BuildingKind::Warehouse;
  if (text == "datacenter") return BuildingKind::Datacenter;
  throw Error(Errc::InvalidConfig, "unknown building '" + text + "' (expected warehouse|datacenter)");
}

std::string to_string(ObsGroup g) {
  switch (g) {
    case ObsGroup::Env: return "Env";
    case ObsGroup::Energy: return "Energy";
    case ObsGroup::Action: return "Action";
    case ObsGroup::Aux: return "Aux";
  }
  return "?";
}

std::string GroupSet::to_string() const {
  std::string out;
  for (auto g : {ObsGroup::Env, ObsGroup::Energy, ObsGroup::Action, ObsGroup::Aux}) {
    if (!contains(g)) continue;
    if (!out.empty()) out += '+';
    out += hvacrl::to_string(g);
  }
  return out;
}

GroupSet GroupSet::parse(const std::string& text) {
  GroupSet out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string lower;
    for (char c : token) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "env") out.insert(ObsGroup::Env);
    else if (lower == "energy") out.insert(ObsGroup::Energy);
    else if (lower == "action") out.insert(ObsGroup::Action);
    else if (lower == "aux") out.insert(ObsGroup::Aux);
    else if (lower == "all") out = GroupSet::all();
    else throw Error(Errc::InvalidConfig, "unknown observation group '" + token + "'");
    token.clear();
  };
  for (char c : text) {
    if (c == '+' || c == ',' || std::isspace(static_cast<unsigned char>(c))) flush();
    else token += c;
  }
  flush();
  return out;
}

ObservationSpec::ObservationSpec(std::vector<ObsVar> vars) : vars_(std::move(vars)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!(vars_[i].lo < vars_[i].hi)) {
      throw Error(Errc::InvalidConfig, "observation '" + vars_[i].name + "' has empty range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (vars_[j].name == vars_[i].name) {
        throw Error(Errc::InvalidConfig, "duplicate observation '" + vars_[i].name + "'");
      }
    }
  }
}

std::size_t ObservationSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return vars_.size();
}

void RewardParams::validate() const {
  if (!(omega >= 0.0 && omega <= 1.0)) throw Error(Errc::InvalidConfig, "omega must lie in [0,1]");
  if (!(lambda_p > 0.0) || !(lambda_t > 0.0)) throw Error(Errc::InvalidConfig, "reward scales must be > 0");
  if (!(t_min < t_max)) throw Error(Errc::InvalidConfig, "comfort band needs t_min < t_max");
}

double temperature_violation(double temp, const RewardParams& params) {
  if (temp >= params.t_min && temp <= params.t_max) return 0.0;
  if (params.form == PenaltyForm::Distance) {
    return temp < params.t_min ? params.t_min - temp : temp - params.t_max;
  }
  return std::abs(temp - params.t_max) + std::abs(temp - params.t_min);
}

double reward(double p_total, std::span<const double> zone_temps, const RewardParams& params) {
  double violation = 0.0;
  for (double t : zone_temps) violation += temperature_violation(t, params);
  return -params.omega * params.lambda_p * p_total - (1.0 - params.omega) * params.lambda_t * violation;
}

// ---------------------------------------------------------------------------
// Action tables

ActionTable::ActionTable(std::vector<SetpointCommand> entries) : entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(kNumActions)) {
    throw Error(Errc::InvalidConfig, "action table must have exactly 10 entries");
  }
}

const SetpointCommand& ActionTable::decode(int action) const {
  if (action < 0 || action >= static_cast<int>(entries_.size())) {
    throw Error(Errc::ActionOutOfRange, "action " + std::to_string(action) + " not in [0, 9]");
  }
  return entries_[static_cast<std::size_t>(action)];
}

ActionTable warehouse_actions() {
  // office hs/cs, fine storage hs/cs, bulk storage hs
  constexpr double rows[kNumActions][5] = {
      {15, 30, 15, 30, 15}, {16, 29, 16, 29, 16}, {17, 28, 17, 28, 17}, {18, 27, 18, 27, 18},
      {19, 26, 19, 26, 19}, {20, 25, 20, 25, 20}, {21, 24, 21, 24, 21}, {22, 23, 22, 23, 22},
      {22, 22, 22, 22, 23}, {21, 21, 21, 21, 24},
  };
  std::vector<SetpointCommand> table;
  for (const auto& r : rows) {
    table.push_back(SetpointCommand{{{r[0], r[1]}, {r[2], r[3]}, {r[4], std::nullopt}}});
  }
  return ActionTable(std::move(table));
}

ActionTable datacenter_actions() {
  // west hs/cs, east hs/cs
  constexpr double rows[kNumActions][4] = {
      {15, 30, 15, 30}, {16, 29, 16, 29}, {17, 28, 17, 28}, {18, 27, 18, 27}, {19, 26, 19, 26},
      {20, 25, 20, 25}, {21, 24, 21, 24}, {22, 23, 22, 23}, {22, 22, 22, 22}, {21, 21, 21, 21},
  };
  std::vector<SetpointCommand> table;
  for (const auto& r : rows) table.push_back(SetpointCommand{{{r[0], r[1]}, {r[2], r[3]}}});
  return ActionTable(std::move(table));
}

// ---------------------------------------------------------------------------
// Observation specs

namespace {

constexpr double kZoneTempLo = 0.0;
constexpr double kZoneTempHi = 40.0;

void add_outdoor(std::vector<ObsVar>& v) {
  v.push_back({"T_out", "degC", ObsGroup::Env, VarKind::OutdoorTemperature, -20.0, 50.0});
  v.push_back({"H_out", "%", ObsGroup::Env, VarKind::Humidity, 0.0, 100.0});
  v.push_back({"V_out", "m/s", ObsGroup::Env, VarKind::WindSpeed, 0.0, 20.0});
  v.push_back({"W_out", "deg", ObsGroup::Env, VarKind::WindDirection, 0.0, 360.0});
  v.push_back({"S_diffuse", "W/m2", ObsGroup::Env, VarKind::Solar, 0.0, 1200.0});
  v.push_back({"S_direct", "W/m2", ObsGroup::Env, VarKind::Solar, 0.0, 1200.0});
}

ObsVar setpoint_var(std::string name) {
  return {std::move(name), "degC", ObsGroup::Action, VarKind::Setpoint, 15.0, 30.0};
}

ObsVar power_var(const BuildingModel& model) {
  return {"P_total", "W", ObsGroup::Energy, VarKind::Power, 0.0, model.max_electric_power()};
}

double occupancy_hi(const ZoneParams& z) {
  return std::max({1.0, z.occupancy.people, z.occupancy.weekend_people});
}

void check_zones(const BuildingModel& model, std::size_t n, const char* what) {
  if (model.zone_count() != n) {
    throw Error(Errc::ZoneCountMismatch, std::string(what) + " expects " + std::to_string(n) + " zones");
  }
}

}  // namespace

ObservationSpec warehouse_observation_spec(const BuildingModel& model) {
  check_zones(model, 3, "warehouse");
  std::vector<ObsVar> v;
  add_outdoor(v);
  v.push_back(setpoint_var("T_office_hs"));
  v.push_back(setpoint_var("T_office_cs"));
  v.push_back({"T_office", "degC", ObsGroup::Env, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
  v.push_back({"H_office", "%", ObsGroup::Env, VarKind::Humidity, 0.0, 100.0});
  v.push_back({"C_office", "people", ObsGroup::Aux, VarKind::Occupancy, 0.0, occupancy_hi(model.zone(0))});
  v.push_back(setpoint_var("T_fs_hs"));
  v.push_back(setpoint_var("T_fs_cs"));
  v.push_back({"T_fs", "degC", ObsGroup::Env, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
  v.push_back({"H_fs", "%", ObsGroup::Env, VarKind::Humidity, 0.0, 100.0});
  v.push_back(setpoint_var("T_bs_hs"));
  v.push_back({"T_bs", "degC", ObsGroup::Env, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
  v.push_back({"H_bs", "%", ObsGroup::Env, VarKind::Humidity, 0.0, 100.0});
  v.push_back(power_var(model));
  return ObservationSpec(std::move(v));
}

ObservationSpec datacenter_observation_spec(const BuildingModel& model) {
  check_zones(model, 2, "datacenter");
  std::vector<ObsVar> v;
  add_outdoor(v);
  const char* tags[2] = {"wz", "ez"};
  for (std::size_t z = 0; z < 2; ++z) {
    const std::string t = tags[z];
    v.push_back(setpoint_var("T_" + t + "_hs"));
    v.push_back(setpoint_var("T_" + t + "_cs"));
    v.push_back({"T_" + t, "degC", ObsGroup::Env, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
    v.push_back({"T_" + t + "_cmr", "degC", ObsGroup::Aux, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
    v.push_back({"H_" + t, "%", ObsGroup::Env, VarKind::Humidity, 0.0, 100.0});
    v.push_back({"T_" + t + "_ccv", "clo", ObsGroup::Aux, VarKind::Clothing, 0.0, 2.0});
    v.push_back({"T_" + t + "_cfm", "%", ObsGroup::Aux, VarKind::Discomfort, 0.0, 100.0});
    v.push_back({"C_" + t, "people", ObsGroup::Aux, VarKind::Occupancy, 0.0, occupancy_hi(model.zone(z))});
    v.push_back({"T_" + t + "_pa", "degC", ObsGroup::Aux, VarKind::ZoneTemperature, kZoneTempLo, kZoneTempHi});
  }
  v.push_back(power_var(model));
  return ObservationSpec(std::move(v));
}

// ---------------------------------------------------------------------------
// Environment

namespace {

constexpr double kInitTempLo = 18.0;
constexpr double kInitTempHi = 24.0;
constexpr double kClothingValue = 0.5;

double ppd_proxy(double temp) { return std::clamp(100.0 * std::abs(temp - 23.0) / 10.0, 0.0, 100.0); }

}  // namespace

BuildingModel default_model(BuildingKind kind) {
  return kind == BuildingKind::Warehouse ? warehouse_model() : datacenter_model();
}

Environment::Environment(BuildingKind kind, BuildingModel model,
                         std::shared_ptr<const WeatherSeries> weather, RewardParams reward, double dt,
                         std::uint64_t seed)
    : kind_(kind),
      model_(std::move(model)),
      weather_(std::move(weather)),
      reward_(reward),
      dt_(dt),
      actions_(kind == BuildingKind::Warehouse ? warehouse_actions() : datacenter_actions()),
      spec_(kind == BuildingKind::Warehouse ? warehouse_observation_spec(model_)
                                            : datacenter_observation_spec(model_)),
      rng_(seed) {
  if (!weather_) throw Error(Errc::EmptyWeather, "no weather series");
  if (!(dt_ > 0.0)) throw Error(Errc::NonPositiveDt, "dt=" + std::to_string(dt_));
  reward_.validate();
  episode_length_ = static_cast<std::int64_t>(std::floor(weather_->duration_seconds() / dt_));
  if (episode_length_ < 1) {
    throw Error(Errc::EmptyWeather, "weather series too short for a single step of " +
                                        std::to_string(dt_) + " s");
  }
  for (const auto& cmd : actions_.entries()) {
    if (cmd.zones.size() != model_.zone_count()) {
      throw Error(Errc::ZoneCountMismatch, "action table does not match building zones");
    }
  }
  reset();
}

const Observation& Environment::reset() {
  std::uniform_real_distribution<double> init(kInitTempLo, kInitTempHi);
  const double rh0 = weather_->records().front().h_out;
  state_ = BuildingState{};
  for (std::size_t z = 0; z < model_.zone_count(); ++z) {
    state_.zone_temps.push_back(init(rng_));
    state_.zone_rh.push_back(rh0);
  }
  steps_ = 0;
  last_action_ = kInitialAction;
  last_p_total_ = 0.0;
  current_ = observe();
  return current_;
}

Observation Environment::observe() const {
  const WeatherRecord w = sample(*weather_, std::min(state_.sim_time, weather_->duration_seconds()));
  const auto& cmd = actions_.decode(last_action_);
  const auto hour = static_cast<long long>(std::floor(state_.sim_time / 3600.0));
  const auto& temps = state_.zone_temps;
  const auto& rh = state_.zone_rh;

  Observation o{w.t_out, w.h_out, w.v_out, w.w_out, w.s_diffuse, w.s_direct};
  o.reserve(spec_.size());
  if (kind_ == BuildingKind::Warehouse) {
    o.insert(o.end(), {cmd.zones[0].heating, *cmd.zones[0].cooling, temps[0], rh[0],
                       model_.zone(0).occupancy.count(hour)});
    o.insert(o.end(), {cmd.zones[1].heating, *cmd.zones[1].cooling, temps[1], rh[1]});
    o.insert(o.end(), {cmd.zones[2].heating, temps[2], rh[2]});
  } else {
    for (std::size_t z = 0; z < 2; ++z) {
      o.insert(o.end(), {cmd.zones[z].heating, *cmd.zones[z].cooling, temps[z], temps[z], rh[z],
                         kClothingValue, ppd_proxy(temps[z]), model_.zone(z).occupancy.count(hour),
                         temps[z]});
    }
  }
  o.push_back(last_p_total_);
  return o;
}

StepResult Environment::step(int action) {
  if (done()) throw Error(Errc::EpisodeFinished, "episode of " + std::to_string(episode_length_) + " steps is over");
  const SetpointCommand& cmd = actions_.decode(action);
  const WeatherRecord w = sample(*weather_, state_.sim_time);
  StepOutput out = hvacrl::step(model_, state_, w, cmd, dt_);

  state_ = std::move(out.state);
  last_action_ = action;
  last_p_total_ = out.p_total;
  ++steps_;

  StepResult r;
  r.reward = hvacrl::reward(out.p_total, state_.zone_temps, reward_);
  r.done = done();
  r.info.p_total = out.p_total;
  r.info.sim_time = state_.sim_time;
  for (double t : state_.zone_temps) r.info.zone_violation.push_back(t < reward_.t_min || t > reward_.t_max);
  current_ = observe();
  r.observation = current_;
  return r;
}

Environment make_env(BuildingKind kind, const WeatherSeries& weather, const RewardParams& reward,
                     double dt, std::uint64_t seed) {
  return Environment(kind, default_model(kind), std::make_shared<const WeatherSeries>(weather), reward, dt,
                     seed);
}

ObservationSpec filter_spec(const ObservationSpec& spec, GroupSet groups) {
  if (groups.empty() || !groups.contains(ObsGroup::Env)) {
    throw Error(Errc::EnvGroupMissing, "observation groups must include Env, got '" + groups.to_string() + "'");
  }
  std::vector<ObsVar> vars;
  for (const auto& v : spec.vars()) {
    if (groups.contains(v.group)) vars.push_back(v);
  }
  return ObservationSpec(std::move(vars));
}

std::pair<Observation, ObservationSpec> filter_observation(const Observation& obs,
                                                           const ObservationSpec& spec, GroupSet groups) {
  if (obs.size() != spec.size()) {
    throw Error(Errc::DimensionMismatch, "observation length does not match its spec");
  }
  ObservationFilter f(spec, groups);
  return {f.apply(obs), f.spec()};
}

ObservationFilter::ObservationFilter(const ObservationSpec& full, GroupSet groups)
    : spec_(filter_spec(full, groups)) {
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (groups.contains(full[i].group)) indices_.push_back(i);
  }
}

Observation ObservationFilter::apply(const Observation& obs) const {
  Observation out;
  out.reserve(indices_.size());
  for (auto i : indices_) out.push_back(obs[i]);
  return out;
}

}  // namespace hvacrl
