// JSON experiment configuration: serialization, strict parsing, schema and
// building-parameter overrides.

#include <fstream>
#include <set>

#include "hvacrl/error.hpp"
#include "hvacrl/harness.hpp"

namespace hvacrl {

using nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects whatever was not consumed.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(Errc::InvalidConfig, where_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidConfig, where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return (it == j_.end() || it->is_null()) ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw Error(Errc::InvalidConfig, "unknown key '" + where_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string penalty_name(PenaltyForm f) { return f == PenaltyForm::Literal ? "literal" : "distance"; }

PenaltyForm parse_penalty(const std::string& s) {
  if (s == "literal") return PenaltyForm::Literal;
  if (s == "distance") return PenaltyForm::Distance;
  throw Error(Errc::InvalidConfig, "reward.penalty must be literal|distance, got '" + s + "'");
}

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::AdaptiveMoment ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::AdaptiveMoment;
  if (s == "sgd") return OptimizerKind::PlainGradient;
  throw Error(Errc::InvalidConfig, "dqn.optimizer must be adam|sgd, got '" + s + "'");
}

std::string loss_name(LossKind k) { return k == LossKind::Squared ? "squared" : "huber"; }

LossKind parse_loss(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "huber") return LossKind::Huber;
  throw Error(Errc::InvalidConfig, "dqn.loss must be squared|huber, got '" + s + "'");
}

json reward_to_json(const RewardParams& r) {
  return {{"omega", r.omega},   {"lambda_p", r.lambda_p}, {"lambda_t", r.lambda_t},
          {"t_min", r.t_min},   {"t_max", r.t_max},       {"penalty", penalty_name(r.form)}};
}

json qlearning_to_json(const QLearningConfig& q) {
  return {{"alpha", q.alpha},       {"gamma", q.gamma},         {"eps_init", q.eps_init},
          {"eps_rate", q.eps_rate}, {"eps_final", q.eps_final}, {"memory_cap", q.memory_cap}};
}

json dqn_to_json(const DQNConfig& d) {
  return {{"lr", d.lr},
          {"gamma", d.gamma},
          {"batch_size", d.batch_size},
          {"buffer_capacity", d.buffer_capacity},
          {"target_sync_interval", d.target_sync_interval},
          {"train_frequency", d.train_frequency},
          {"learning_starts", d.learning_starts},
          {"eps_init", d.eps_init},
          {"eps_final", d.eps_final},
          {"exploration_fraction", d.exploration_fraction},
          {"hidden", d.hidden},
          {"optimizer", optimizer_name(d.optimizer)},
          {"adam_beta1", d.adam_beta1},
          {"adam_beta2", d.adam_beta2},
          {"adam_epsilon", d.adam_epsilon},
          {"loss", loss_name(d.loss)}};
}

void apply_zone_override(ZoneParams& z, const json& j, const std::string& where) {
  StrictObject o(j, where);
  o.read("capacitance", z.capacitance);
  o.read("envelope_conductance", z.envelope_conductance);
  o.read("heat_capacity", z.heat_capacity);
  o.read("cool_capacity", z.cool_capacity);
  o.read("cop_heat", z.cop_heat);
  o.read("cop_cool", z.cop_cool);
  o.read("internal_gain_base", z.internal_gain_base);
  o.read("occupant_gain", z.occupant_gain);
  o.read("controller_gain", z.controller_gain);
  if (const json* occ = o.child("occupancy")) {
    StrictObject s(*occ, where + ".occupancy");
    s.read("start_hour", z.occupancy.start_hour);
    s.read("end_hour", z.occupancy.end_hour);
    s.read("people", z.occupancy.people);
    s.read("weekend_people", z.occupancy.weekend_people);
    s.finish();
  }
  o.finish();
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  return {
      {"building", to_string(c.building)},
      {"weather", c.weather},
      {"synthetic_hours", c.synthetic_hours},
      {"agent", to_string(c.agent)},
      {"episodes", c.episodes},
      {"seed", c.seed},
      {"seeds", c.seeds},
      {"split_fraction", c.split_fraction},
      {"dt", c.dt},
      {"reward", reward_to_json(c.reward)},
      {"observation_groups", c.observation_groups ? json(c.observation_groups->to_string()) : json(nullptr)},
      {"tile_width", c.tile_width},
      {"humidity_tile_width", c.humidity_tile_width},
      {"fixed_action", c.fixed_action},
      {"qlearning", qlearning_to_json(c.qlearning)},
      {"dqn", dqn_to_json(c.dqn)},
      {"building_overrides", c.building_overrides},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  StrictObject o(j, "config");
  std::string text;
  text = to_string(c.building);
  o.read("building", text);
  c.building = parse_building_kind(text);
  o.read("weather", c.weather);
  o.read("synthetic_hours", c.synthetic_hours);
  text = to_string(c.agent);
  o.read("agent", text);
  c.agent = parse_agent_kind(text);
  o.read("episodes", c.episodes);
  o.read("seed", c.seed);
  o.read("seeds", c.seeds);
  o.read("split_fraction", c.split_fraction);
  o.read("dt", c.dt);
  if (const json* r = o.child("reward")) {
    StrictObject s(*r, "config.reward");
    s.read("omega", c.reward.omega);
    s.read("lambda_p", c.reward.lambda_p);
    s.read("lambda_t", c.reward.lambda_t);
    s.read("t_min", c.reward.t_min);
    s.read("t_max", c.reward.t_max);
    std::string penalty = penalty_name(c.reward.form);
    s.read("penalty", penalty);
    c.reward.form = parse_penalty(penalty);
    s.finish();
  }
  if (const json* g = o.child("observation_groups")) {
    if (!g->is_string()) throw Error(Errc::InvalidConfig, "observation_groups must be a string like \"Env+Energy\"");
    c.observation_groups = GroupSet::parse(g->get<std::string>());
  }
  o.read("tile_width", c.tile_width);
  o.read("humidity_tile_width", c.humidity_tile_width);
  o.read("fixed_action", c.fixed_action);
  if (const json* q = o.child("qlearning")) {
    StrictObject s(*q, "config.qlearning");
    s.read("alpha", c.qlearning.alpha);
    s.read("gamma", c.qlearning.gamma);
    s.read("eps_init", c.qlearning.eps_init);
    s.read("eps_rate", c.qlearning.eps_rate);
    s.read("eps_final", c.qlearning.eps_final);
    s.read("memory_cap", c.qlearning.memory_cap);
    s.finish();
  }
  if (const json* d = o.child("dqn")) {
    StrictObject s(*d, "config.dqn");
    s.read("lr", c.dqn.lr);
    s.read("gamma", c.dqn.gamma);
    s.read("batch_size", c.dqn.batch_size);
    s.read("buffer_capacity", c.dqn.buffer_capacity);
    s.read("target_sync_interval", c.dqn.target_sync_interval);
    s.read("train_frequency", c.dqn.train_frequency);
    s.read("learning_starts", c.dqn.learning_starts);
    s.read("eps_init", c.dqn.eps_init);
    s.read("eps_final", c.dqn.eps_final);
    s.read("exploration_fraction", c.dqn.exploration_fraction);
    s.read("hidden", c.dqn.hidden);
    std::string name = optimizer_name(c.dqn.optimizer);
    s.read("optimizer", name);
    c.dqn.optimizer = parse_optimizer(name);
    s.read("adam_beta1", c.dqn.adam_beta1);
    s.read("adam_beta2", c.dqn.adam_beta2);
    s.read("adam_epsilon", c.dqn.adam_epsilon);
    name = loss_name(c.dqn.loss);
    s.read("loss", name);
    c.dqn.loss = parse_loss(name);
    s.finish();
  }
  if (const json* b = o.child("building_overrides")) c.building_overrides = *b;
  o.read("output_dir", c.output_dir);
  o.finish();
  c.validate();
  // Catch override typos at load time rather than mid-run.
  build_model(c);
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

BuildingModel build_model(const ExperimentConfig& cfg) {
  const json& ov = cfg.building_overrides;
  if (ov.is_null() || (ov.is_object() && ov.empty())) return default_model(cfg.building);

  StrictObject o(ov, "building_overrides");
  double it_gain = 10000.0;
  o.read("it_gain", it_gain);
  if (cfg.building == BuildingKind::Warehouse && ov.contains("it_gain")) {
    throw Error(Errc::InvalidConfig, "building_overrides.it_gain applies to the datacenter only");
  }
  BuildingModel base = cfg.building == BuildingKind::Warehouse ? warehouse_model() : datacenter_model(it_gain);
  auto zones = base.zones();
  auto coupling = base.coupling();
  if (const json* zj = o.child("zones")) {
    if (!zj->is_object()) throw Error(Errc::InvalidConfig, "building_overrides.zones must be an object");
    for (const auto& [name, params] : zj->items()) {
      auto it = std::find_if(zones.begin(), zones.end(), [&](const ZoneParams& z) { return z.name == name; });
      if (it == zones.end()) throw Error(Errc::InvalidConfig, "unknown zone '" + name + "' in building_overrides");
      apply_zone_override(*it, params, "building_overrides.zones." + name);
    }
  }
  o.read("interzone_conductance", coupling);
  o.finish();
  return BuildingModel(base.name(), std::move(zones), std::move(coupling));
}

json config_schema() {
  const ExperimentConfig d;
  auto entry = [](json def, const char* doc) { return json{{"default", std::move(def)}, {"description", doc}}; };
  json s;
  s["building"] = entry(to_string(d.building), "warehouse | datacenter");
  s["weather"] = entry(d.weather, "synthetic:hot | synthetic:cool | path to an .epw file");
  s["synthetic_hours"] = entry(d.synthetic_hours, "length of a synthetic weather series, hours");
  s["agent"] = entry(to_string(d.agent), "fixed | random | qlearning | dqn");
  s["episodes"] = entry(d.episodes, "training passes over the training weather segment (>= 1)");
  s["seed"] = entry(d.seed, "master seed; weather noise, initial temperatures, exploration and weights derive from it");
  s["seeds"] = entry(d.seeds, "consecutive seeds run per ablation setting (seed, seed+1, ...)");
  s["split_fraction"] = entry(d.split_fraction, "chronological share of the weather used for training");
  s["dt"] = entry(d.dt, "control step, seconds");
  s["reward"] = {
      {"omega", entry(d.reward.omega, "energy weight in [0,1]; comfort weight is 1-omega")},
      {"lambda_p", entry(d.reward.lambda_p, "energy scale, 1/W")},
      {"lambda_t", entry(d.reward.lambda_t, "comfort scale, 1/degC")},
      {"t_min", entry(d.reward.t_min, "comfort band lower edge, degC")},
      {"t_max", entry(d.reward.t_max, "comfort band upper edge, degC")},
      {"penalty", entry(penalty_name(d.reward.form), "literal (|T-t_max|+|T-t_min| outside band) | distance")},
  };
  s["observation_groups"] = entry(nullptr, "e.g. \"Env+Energy\"; null = Env for qlearning, all groups otherwise");
  s["tile_width"] = entry(d.tile_width, "temperature tile width for qlearning, degC");
  s["humidity_tile_width"] = entry(d.humidity_tile_width, "humidity tile width for qlearning, %");
  s["fixed_action"] = entry(d.fixed_action, "action index held by the fixed agent, 0..9");
  s["qlearning"] = {
      {"alpha", entry(d.qlearning.alpha, "learning rate")},
      {"gamma", entry(d.qlearning.gamma, "discount")},
      {"eps_init", entry(d.qlearning.eps_init, "exploration rate in episode 0")},
      {"eps_rate", entry(d.qlearning.eps_rate, "linear decrement per completed episode")},
      {"eps_final", entry(d.qlearning.eps_final, "exploration floor")},
      {"memory_cap", entry(d.qlearning.memory_cap, "max Q-table entries (tile states x actions)")},
  };
  s["dqn"] = {
      {"lr", entry(d.dqn.lr, "optimizer step size")},
      {"gamma", entry(d.dqn.gamma, "discount")},
      {"batch_size", entry(d.dqn.batch_size, "minibatch size")},
      {"buffer_capacity", entry(d.dqn.buffer_capacity, "replay memory capacity")},
      {"target_sync_interval", entry(d.dqn.target_sync_interval, "env steps between target-network copies")},
      {"train_frequency", entry(d.dqn.train_frequency, "env steps between gradient updates")},
      {"learning_starts", entry(d.dqn.learning_starts, "transitions collected before the first update")},
      {"eps_init", entry(d.dqn.eps_init, "initial exploration rate")},
      {"eps_final", entry(d.dqn.eps_final, "final exploration rate")},
      {"exploration_fraction", entry(d.dqn.exploration_fraction, "share of training steps spent annealing epsilon")},
      {"hidden", entry(d.dqn.hidden, "hidden layer widths (ReLU)")},
      {"optimizer", entry(optimizer_name(d.dqn.optimizer), "adam | sgd")},
      {"adam_beta1", entry(d.dqn.adam_beta1, "first-moment decay")},
      {"adam_beta2", entry(d.dqn.adam_beta2, "second-moment decay")},
      {"adam_epsilon", entry(d.dqn.adam_epsilon, "denominator floor")},
      {"loss", entry(loss_name(d.dqn.loss), "squared | huber")},
  };
  s["building_overrides"] = entry(
      json::object(),
      "{\"zones\": {<zone>: {capacitance, envelope_conductance, heat_capacity, cool_capacity, cop_heat, cop_cool, "
      "internal_gain_base, occupant_gain, controller_gain, occupancy: {start_hour, end_hour, people, "
      "weekend_people}}}, \"interzone_conductance\": [[...]], \"it_gain\": W (datacenter)}");
  s["output_dir"] = entry(d.output_dir, "output root; empty = $HVACRL_OUT, else ./runs; each command writes a timestamped subdirectory");
  return s;
}

}  // namespace hvacrl
