#include "hvacrl/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "hvacrl/error.hpp"

#ifndef HVACRL_VERSION
#define HVACRL_VERSION "dev"
#endif

namespace hvacrl {

const char* code_version() { return HVACRL_VERSION; }

double energy_kwh(std::span<const double> power_w, double dt) {
  double joules = 0.0;
  for (double p : power_w) joules += p * dt;
  return joules / 3.6e6;
}

double violation_pct(std::int64_t violating_steps, std::int64_t total_steps) {
  if (total_steps <= 0) throw Error(Errc::InvalidConfig, "no evaluation steps");
  return 100.0 * static_cast<double>(violating_steps) / static_cast<double>(total_steps);
}

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Fixed: return "fixed";
    case AgentKind::Random: return "random";
    case AgentKind::QLearning: return "qlearning";
    case AgentKind::Dqn: return "dqn";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& text) {
  if (text == "fixed") return AgentKind::Fixed;
  if (text == "random") return AgentKind::Random;
  if (text == "qlearning") return AgentKind::QLearning;
  if (text == "dqn") return AgentKind::Dqn;
  throw Error(Errc::InvalidConfig, "unknown agent '" + text + "' (expected fixed|random|qlearning|dqn)");
}

void ExperimentConfig::validate() const {
  if (episodes < 1) throw Error(Errc::InvalidConfig, "episodes must be >= 1");
  if (seeds < 1) throw Error(Errc::InvalidConfig, "seeds must be >= 1");
  if (fixed_action < 0 || fixed_action >= kNumActions) {
    throw Error(Errc::InvalidConfig, "fixed_action must lie in [0, 9]");
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "split_fraction must lie in (0, 1)");
  }
  if (!(dt > 0.0)) throw Error(Errc::InvalidConfig, "dt must be > 0");
  if (synthetic_hours < 2) throw Error(Errc::InvalidConfig, "synthetic_hours must be >= 2");
  if (!(tile_width > 0.0) || !(humidity_tile_width > 0.0)) {
    throw Error(Errc::InvalidConfig, "tile widths must be > 0");
  }
  if (observation_groups && !observation_groups->contains(ObsGroup::Env)) {
    throw Error(Errc::EnvGroupMissing, "observation_groups must include Env");
  }
  reward.validate();
  qlearning.validate();
  dqn.validate();
}

GroupSet ExperimentConfig::effective_groups() const {
  if (observation_groups) return *observation_groups;
  return agent == AgentKind::QLearning ? GroupSet{ObsGroup::Env} : GroupSet::all();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent RNG streams per experiment seed.
enum class Stream : std::uint64_t { Weather = 1, TrainEnv = 2, EvalEnv = 3, Agent = 4, Explore = 5 };

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
}

Environment make_segment_env(const ExperimentConfig& cfg, const WeatherSeries& segment, Stream stream) {
  return Environment(cfg.building, build_model(cfg), std::make_shared<const WeatherSeries>(segment), cfg.reward,
                     cfg.dt, derive_seed(cfg.seed, stream));
}

using Policy = std::function<int(const Observation&)>;

/// One greedy pass over the evaluation segment.
Metrics rollout_eval(const ExperimentConfig& cfg, const Policy& policy) {
  const WeatherSplit ws = load_split(cfg);
  Environment env = make_segment_env(cfg, ws.eval, Stream::EvalEnv);
  Observation obs = env.reset();
  std::vector<double> power;
  power.reserve(static_cast<std::size_t>(env.episode_length()));
  double reward_sum = 0.0;
  std::int64_t violating = 0;
  while (!env.done()) {
    const StepResult r = env.step(policy(obs));
    power.push_back(r.info.p_total);
    reward_sum += r.reward;
    for (bool v : r.info.zone_violation) {
      if (v) {
        ++violating;
        break;
      }
    }
    obs = r.observation;
  }
  Metrics m;
  m.energy_kwh = energy_kwh(power, env.dt());
  m.violation_pct = violation_pct(violating, env.steps_taken());
  m.mean_eval_reward = reward_sum / static_cast<double>(env.steps_taken());
  return m;
}

std::vector<double> train_qlearning(const ExperimentConfig& cfg, Environment& env,
                                    const ObservationFilter& filter, QTable& q, const TileCodingSpec& tiles) {
  std::mt19937_64 rng(derive_seed(cfg.seed, Stream::Explore));
  std::vector<double> returns;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = anneal_eps(ep, cfg.qlearning);
    DiscreteState s = encode(filter.apply(env.reset()), tiles);
    double total = 0.0;
    while (!env.done()) {
      const int a = select_action(q, s, eps, rng);
      const StepResult r = env.step(a);
      DiscreteState next = encode(filter.apply(r.observation), tiles);
      update(q, s, a, r.reward, next, cfg.qlearning);
      s = std::move(next);
      total += r.reward;
    }
    returns.push_back(total / static_cast<double>(env.steps_taken()));
  }
  return returns;
}

std::vector<double> train_dqn(const ExperimentConfig& cfg, Environment& env, const ObservationFilter& filter,
                              DQNAgent& agent) {
  std::mt19937_64 rng(derive_seed(cfg.seed, Stream::Explore));
  const std::int64_t total_steps = static_cast<std::int64_t>(cfg.episodes) * env.episode_length();
  std::int64_t step = 0;
  std::vector<double> returns;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    Observation obs = filter.apply(env.reset());
    double total = 0.0;
    while (!env.done()) {
      const int a = agent.act(obs, dqn_epsilon(step, total_steps, cfg.dqn), rng);
      const StepResult r = env.step(a);
      Observation next = filter.apply(r.observation);
      // Episode ends are time limits: stored as non-terminal and bootstrapped.
      agent.remember(obs, a, r.reward, next, false);
      ++step;
      agent.train_step(step);
      obs = std::move(next);
      total += r.reward;
    }
    returns.push_back(total / static_cast<double>(env.steps_taken()));
  }
  return returns;
}

}  // namespace

WeatherSplit load_split(const ExperimentConfig& cfg) {
  const WeatherSeries series = load_weather(cfg.weather, derive_seed(cfg.seed, Stream::Weather), cfg.synthetic_hours);
  return split(series, cfg.split_fraction);
}

TrainOutput train(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.agent != AgentKind::QLearning && cfg.agent != AgentKind::Dqn) {
    throw Error(Errc::InvalidConfig, "train needs agent qlearning or dqn, got " + to_string(cfg.agent));
  }
  const WeatherSplit ws = load_split(cfg);
  Environment env = make_segment_env(cfg, ws.train, Stream::TrainEnv);
  const ObservationFilter filter(env.spec(), cfg.effective_groups());

  if (cfg.agent == AgentKind::QLearning) {
    TileCodingSpec tiles = default_tile_spec(filter.spec(), cfg.tile_width, cfg.humidity_tile_width);
    state_space_guard(tiles, kNumActions, cfg.qlearning.memory_cap);
    QTable q(cfg.qlearning.memory_cap);
    auto returns = train_qlearning(cfg, env, filter, q, tiles);
    return {TabularPolicy{std::move(q), std::move(tiles)}, std::move(returns)};
  }
  DQNAgent agent(Normalizer(filter.spec()), cfg.dqn, derive_seed(cfg.seed, Stream::Agent));
  auto returns = train_dqn(cfg, env, filter, agent);
  return {NetworkPolicy{agent.online()}, std::move(returns)};
}

Metrics evaluate(const AgentArtifact& artifact, const ExperimentConfig& cfg) {
  cfg.validate();
  const BuildingModel model = build_model(cfg);
  const ObservationSpec full = cfg.building == BuildingKind::Warehouse ? warehouse_observation_spec(model)
                                                                        : datacenter_observation_spec(model);
  const ObservationFilter filter(full, cfg.effective_groups());

  if (const auto* tab = std::get_if<TabularPolicy>(&artifact)) {
    if (tab->tiles.size() != filter.spec().size()) {
      throw Error(Errc::SpecMismatch, "Q-table tiling covers " + std::to_string(tab->tiles.size()) +
                                          " variables, config selects " + std::to_string(filter.spec().size()));
    }
    return rollout_eval(cfg, [&](const Observation& obs) {
      return argmax_action(tab->table.row(encode(filter.apply(obs), tab->tiles).flat));
    });
  }
  const auto& net = std::get<NetworkPolicy>(artifact);
  const Normalizer norm(filter.spec());
  if (static_cast<std::size_t>(net.params.input_dim()) != norm.size()) {
    throw Error(Errc::DimensionMismatch, "network input width " + std::to_string(net.params.input_dim()) +
                                             " does not match " + std::to_string(norm.size()) + " observations");
  }
  return rollout_eval(cfg, [&](const Observation& obs) {
    return greedy_action(net.params, norm.normalize(filter.apply(obs)));
  });
}

Metrics run_fixed_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  const int action = cfg.fixed_action;
  return rollout_eval(cfg, [action](const Observation&) { return action; });
}

Metrics run_random_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(cfg.seed, Stream::Explore));
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  return rollout_eval(cfg, [&](const Observation&) { return pick(rng); });
}

ResultRecord run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.run = run_name(cfg);
  rec.config = cfg;
  rec.code_version = code_version();
  switch (cfg.agent) {
    case AgentKind::Fixed: rec.metrics = run_fixed_baseline(cfg); break;
    case AgentKind::Random: rec.metrics = run_random_baseline(cfg); break;
    case AgentKind::QLearning:
    case AgentKind::Dqn: {
      TrainOutput t = train(cfg);
      rec.metrics = evaluate(t.artifact, cfg);
      rec.metrics.episode_returns = std::move(t.episode_returns);
      break;
    }
  }
  rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ResultRecord> run_all(const std::vector<ExperimentConfig>& configs, int jobs) {
  std::vector<ResultRecord> out(configs.size());
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(configs.size(), 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = run_experiment(configs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        try {
          out[i] = run_experiment(configs[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

void push_seeds(std::vector<ExperimentConfig>& out, ExperimentConfig cfg, int seeds) {
  const std::uint64_t base = cfg.seed;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = base + static_cast<std::uint64_t>(s);
    out.push_back(cfg);
  }
}

}  // namespace

std::vector<ExperimentConfig> observation_ablation_configs(const ExperimentConfig& cfg) {
  if (cfg.agent != AgentKind::QLearning && cfg.agent != AgentKind::Dqn) {
    throw Error(Errc::InvalidConfig, "observation ablation needs agent qlearning or dqn");
  }
  std::vector<GroupSet> sets = {{ObsGroup::Env}, {ObsGroup::Env, ObsGroup::Energy}};
  if (cfg.agent == AgentKind::Dqn) {
    sets.push_back({ObsGroup::Env, ObsGroup::Energy, ObsGroup::Action});
    sets.push_back(GroupSet::all());
  }
  std::vector<ExperimentConfig> out;
  for (const auto& g : sets) {
    ExperimentConfig c = cfg;
    c.observation_groups = g;
    push_seeds(out, c, cfg.seeds);
  }
  return out;
}

std::vector<ExperimentConfig> reward_ablation_configs(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> out;
  for (double omega : {0.25, 0.5, 0.75}) {
    ExperimentConfig c = cfg;
    c.agent = AgentKind::Dqn;
    c.reward.omega = omega;
    push_seeds(out, c, cfg.seeds);
  }
  return out;
}

std::vector<ExperimentConfig> tile_ablation_configs(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> out;
  for (const auto& [temp, humidity] : {std::pair{5.0, 10.0}, std::pair{2.0, 4.0}}) {
    ExperimentConfig c = cfg;
    c.agent = AgentKind::QLearning;
    c.observation_groups = GroupSet{ObsGroup::Env};
    c.tile_width = temp;
    c.humidity_tile_width = humidity;
    push_seeds(out, c, cfg.seeds);
  }
  return out;
}

std::vector<ExperimentConfig> baseline_comparison_configs(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> out;
  for (AgentKind kind : {AgentKind::Fixed, AgentKind::QLearning, AgentKind::Dqn}) {
    ExperimentConfig c = cfg;
    c.agent = kind;
    c.observation_groups.reset();
    push_seeds(out, c, cfg.seeds);
  }
  return out;
}

std::vector<ResultRecord> ablate_observations(const ExperimentConfig& cfg, int jobs) {
  return run_all(observation_ablation_configs(cfg), jobs);
}

std::vector<ResultRecord> ablate_reward_weights(const ExperimentConfig& cfg, int jobs) {
  return run_all(reward_ablation_configs(cfg), jobs);
}

std::vector<ResultRecord> ablate_tile_density(const ExperimentConfig& cfg, int jobs) {
  return run_all(tile_ablation_configs(cfg), jobs);
}

std::vector<ResultRecord> compare_baselines(const ExperimentConfig& cfg, int jobs) {
  return run_all(baseline_comparison_configs(cfg), jobs);
}

}  // namespace hvacrl
