#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "hvacrl/error.hpp"
#include "hvacrl/harness.hpp"

namespace hvacrl {

namespace fs = std::filesystem;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::EnvGroupMissing:
    case Errc::ActionOutOfRange:
    case Errc::SpecMismatch:
    case Errc::DegenerateSplit:
    case Errc::HoursTooSmall:
    case Errc::NonPositiveDt:
      return kExitConfig;
    case Errc::IoFailure:
    case Errc::TooFewHeaderLines:
    case Errc::RowFieldCountBelow22:
    case Errc::NonNumericField:
      return kExitIo;
    default:
      return kExitRuntime;
  }
}

/// Output root: flag, then config, then $HVACRL_OUT, then ./runs.
fs::path output_root(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("HVACRL_OUT"); env && *env) return env;
  return "runs";
}

fs::path make_run_dir(const fs::path& root, const std::string& command) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  const std::string base = command + "-" + stamp;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + root.string() + ": " + ec.message());
  for (int n = 0;; ++n) {
    const fs::path dir = root / (n == 0 ? base : base + "-" + std::to_string(n));
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  }
}

void write_config_snapshot(const ExperimentConfig& cfg, const fs::path& dir) {
  std::ofstream out(dir / "config.json");
  out << config_to_json(cfg).dump(2) << '\n';
  if (!out) throw Error(Errc::IoFailure, "cannot write " + (dir / "config.json").string());
}

/// Flags shared by train/evaluate/ablate; each overrides the config file only when given.
struct ConfigFlags {
  ExperimentConfig defaults;
  std::string config_path;
  std::string out;
  std::string building = to_string(defaults.building);
  std::string weather = defaults.weather;
  std::string agent = to_string(defaults.agent);
  int episodes = defaults.episodes;
  std::uint64_t seed = defaults.seed;
  int seeds = defaults.seeds;
  double omega = defaults.reward.omega;
  std::string groups = "default";
  double tile_width = defaults.tile_width;
  double humidity_tile_width = defaults.humidity_tile_width;
  int fixed_action = defaults.fixed_action;
  double split_fraction = defaults.split_fraction;
  double dt = defaults.dt;
  std::int64_t synthetic_hours = defaults.synthetic_hours;

  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;

  void attach(CLI::App& app, bool with_agent = true) {
    app.add_option("--config", config_path, "JSON config file (see `schema`)")->default_str("none");
    app.add_option("--out", out, "output root; a timestamped run directory is created inside")
        ->default_str("$HVACRL_OUT or ./runs");
    bind(app.add_option("--building", building, "warehouse | datacenter"),
         [this](ExperimentConfig& c) { c.building = parse_building_kind(building); });
    bind(app.add_option("--weather", weather, "synthetic:hot | synthetic:cool | path to .epw"),
         [this](ExperimentConfig& c) { c.weather = weather; });
    if (with_agent) {
      bind(app.add_option("--agent", agent, "fixed | random | qlearning | dqn"),
           [this](ExperimentConfig& c) { c.agent = parse_agent_kind(agent); });
    }
    bind(app.add_option("--episodes", episodes, "training episodes"),
         [this](ExperimentConfig& c) { c.episodes = episodes; });
    bind(app.add_option("--seed", seed, "master seed (overrides the config file)"),
         [this](ExperimentConfig& c) { c.seed = seed; });
    bind(app.add_option("--seeds", seeds, "consecutive seeds per ablation setting"),
         [this](ExperimentConfig& c) { c.seeds = seeds; });
    bind(app.add_option("--omega", omega, "energy weight of the reward"),
         [this](ExperimentConfig& c) { c.reward.omega = omega; });
    bind(app.add_option("--groups", groups, "observation groups, e.g. Env+Energy; default: per agent"),
         [this](ExperimentConfig& c) { c.observation_groups = GroupSet::parse(groups); });
    bind(app.add_option("--tile-width", tile_width, "temperature tile width, degC"),
         [this](ExperimentConfig& c) { c.tile_width = tile_width; });
    bind(app.add_option("--humidity-tile-width", humidity_tile_width, "humidity tile width, %"),
         [this](ExperimentConfig& c) { c.humidity_tile_width = humidity_tile_width; });
    bind(app.add_option("--fixed-action", fixed_action, "action held by the fixed agent"),
         [this](ExperimentConfig& c) { c.fixed_action = fixed_action; });
    bind(app.add_option("--split", split_fraction, "training share of the weather series"),
         [this](ExperimentConfig& c) { c.split_fraction = split_fraction; });
    bind(app.add_option("--dt", dt, "control step, seconds"), [this](ExperimentConfig& c) { c.dt = dt; });
    bind(app.add_option("--synthetic-hours", synthetic_hours, "length of synthetic weather, hours"),
         [this](ExperimentConfig& c) { c.synthetic_hours = synthetic_hours; });
  }

  void bind(CLI::Option* opt, std::function<void(ExperimentConfig&)> fn) {
    setters.emplace_back(opt, std::move(fn));
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    for (const auto& [opt, fn] : setters) {
      if (opt->count() > 0) fn(cfg);
    }
    cfg.validate();
    build_model(cfg);
    return cfg;
  }
};

void print_metrics(std::ostream& out, const ResultRecord& r) {
  out << r.run << ": energy_kwh=" << std::setprecision(10) << r.metrics.energy_kwh
      << " violation_pct=" << r.metrics.violation_pct << '\n';
}

int cmd_simulate(const std::string& env_name, const std::string& weather_src, int action, std::int64_t hours,
                 std::uint64_t seed, double dt, const std::string& out_flag, std::ostream& out) {
  if (hours < 1) throw Error(Errc::InvalidConfig, "--hours must be >= 1");
  const BuildingKind kind = parse_building_kind(env_name);
  const WeatherSeries weather = load_weather(weather_src, seed, std::max<std::int64_t>(hours + 1, 2));
  Environment env = make_env(kind, weather, RewardParams{}, dt, seed);
  const auto steps = static_cast<std::int64_t>(std::floor(static_cast<double>(hours) * 3600.0 / dt));
  if (steps > env.episode_length()) {
    throw Error(Errc::InvalidConfig, "weather covers only " + std::to_string(env.episode_length()) + " steps");
  }
  const SetpointCommand& cmd = env.actions().decode(action);

  fs::path file;
  if (!out_flag.empty()) {
    file = out_flag;
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
  } else {
    file = make_run_dir(output_root("", ""), "simulate") / "trace.csv";
  }
  std::ofstream csv(file);
  if (!csv) throw Error(Errc::IoFailure, "cannot write " + file.string());

  const auto& zones = env.model().zones();
  csv << "time_s,T_out";
  for (const auto& z : zones) csv << ",T_" << z.name;
  for (const auto& z : zones) csv << ",heat_sp_" << z.name << ",cool_sp_" << z.name;
  csv << ",p_total,reward\n" << std::setprecision(10);

  env.reset();
  for (std::int64_t i = 0; i < steps; ++i) {
    const StepResult r = env.step(action);
    const double t = env.state().sim_time;
    csv << t << ',' << sample(weather, t).t_out;
    for (double temp : env.state().zone_temps) csv << ',' << temp;
    for (const auto& sp : cmd.zones) {
      csv << ',' << sp.heating << ',';
      if (sp.cooling) csv << *sp.cooling;
    }
    csv << ',' << r.info.p_total << ',' << r.reward << '\n';
  }
  if (!csv) throw Error(Errc::IoFailure, "cannot write " + file.string());
  out << "wrote " << steps << " steps to " << file.string() << '\n';
  return kExitOk;
}

int cmd_train(const ConfigFlags& flags, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const fs::path dir = make_run_dir(output_root(flags.out, cfg.output_dir), "train");
  write_config_snapshot(cfg, dir);
  ResultRecord rec;
  if (cfg.agent == AgentKind::QLearning || cfg.agent == AgentKind::Dqn) {
    const auto start = std::chrono::steady_clock::now();
    TrainOutput t = train(cfg);
    const fs::path artifact = save_artifact(t.artifact, dir);
    rec.run = run_name(cfg);
    rec.config = cfg;
    rec.code_version = code_version();
    rec.metrics = evaluate(t.artifact, cfg);
    rec.metrics.episode_returns = std::move(t.episode_returns);
    rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "agent artifact: " << artifact.string() << '\n';
  } else {
    rec = run_experiment(cfg);
  }
  write_results({rec}, dir);
  print_metrics(out, rec);
  out << "output: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const ConfigFlags& flags, const std::string& artifact_path, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  const AgentArtifact artifact = load_artifact(artifact_path);
  ExperimentConfig recorded = cfg;
  recorded.agent = std::holds_alternative<TabularPolicy>(artifact) ? AgentKind::QLearning : AgentKind::Dqn;
  const fs::path dir = make_run_dir(output_root(flags.out, cfg.output_dir), "evaluate");
  write_config_snapshot(recorded, dir);
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.metrics = evaluate(artifact, recorded);
  rec.run = run_name(recorded);
  rec.config = recorded;
  rec.code_version = code_version();
  rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_results({rec}, dir);
  print_metrics(out, rec);
  out << "output: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_ablate(const ConfigFlags& flags, const std::string& suite, int jobs, std::ostream& out) {
  const ExperimentConfig cfg = flags.resolve();
  if (jobs < 1) throw Error(Errc::InvalidConfig, "--jobs must be >= 1");
  std::vector<ExperimentConfig> configs;
  if (suite == "obs") configs = observation_ablation_configs(cfg);
  else if (suite == "reward") configs = reward_ablation_configs(cfg);
  else if (suite == "tiles") configs = tile_ablation_configs(cfg);
  else if (suite == "baseline") configs = baseline_comparison_configs(cfg);
  else throw Error(Errc::InvalidConfig, "unknown suite '" + suite + "'");
  const fs::path dir = make_run_dir(output_root(flags.out, cfg.output_dir), "ablate-" + suite);
  write_config_snapshot(cfg, dir);
  const auto records = run_all(configs, jobs);
  write_results(records, dir);
  for (const auto& r : records) print_metrics(out, r);
  out << "output: " << dir.string() << '\n';
  return kExitOk;
}

int cmd_report(const std::string& dir_flag, std::ostream& out) {
  const fs::path dir = dir_flag;
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
      if (it->is_regular_file() && it->path().filename() == "results.csv") files.push_back(it->path());
    }
  }
  if (files.empty()) throw Error(Errc::IoFailure, "no results.csv found under " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<ResultRow> rows;
  for (const auto& f : files) {
    auto part = read_results_csv(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const auto summary = summarize(rows);

  const fs::path report = dir / "report.csv";
  std::ofstream csv(report);
  if (!csv) throw Error(Errc::IoFailure, "cannot write " + report.string());
  csv << "agent,building,groups,omega,tile_width,runs,median_energy_kwh,median_violation_pct\n"
      << std::setprecision(10);
  out << std::left << std::setw(10) << "agent" << std::setw(11) << "building" << std::setw(22) << "groups"
      << std::setw(7) << "omega" << std::setw(6) << "tile" << std::setw(6) << "runs" << std::setw(14)
      << "energy_kWh" << "violation_%" << '\n';
  for (const auto& s : summary) {
    csv << s.agent << ',' << s.building << ',' << s.groups << ',' << s.omega << ',' << s.tile_width << ','
        << s.runs << ',' << s.median_energy_kwh << ',' << s.median_violation_pct << '\n';
    std::ostringstream tile;
    if (s.tile_width > 0) tile << s.tile_width;
    else tile << '-';
    out << std::setw(10) << s.agent << std::setw(11) << s.building << std::setw(22) << s.groups << std::setw(7)
        << s.omega << std::setw(6) << tile.str() << std::setw(6) << s.runs << std::setw(14) << std::fixed
        << std::setprecision(1) << s.median_energy_kwh << std::setprecision(2) << s.median_violation_pct
        << std::defaultfloat << std::setprecision(6) << '\n';
  }
  if (!csv) throw Error(Errc::IoFailure, "cannot write " + report.string());
  out << "rows: " << rows.size() << " from " << files.size() << " file(s); wrote " << report.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tabular Q-learning vs DQN for HVAC setpoint control on an RC thermal simulator", "hvacrl"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(code_version()));

  std::string sim_env = "warehouse", sim_weather = "synthetic:hot", sim_out;
  int sim_action = 7;
  std::int64_t sim_hours = 24;
  std::uint64_t sim_seed = 0;
  double sim_dt = 900.0;
  auto* simulate = app.add_subcommand("simulate", "hold one action and write a per-step trace CSV");
  simulate->add_option("--env", sim_env, "warehouse | datacenter");
  simulate->add_option("--weather", sim_weather, "synthetic:hot | synthetic:cool | path to .epw");
  simulate->add_option("--action", sim_action, "action index")->check(CLI::Range(0, kNumActions - 1));
  simulate->add_option("--hours", sim_hours, "simulated hours");
  simulate->add_option("--seed", sim_seed, "seed for weather noise and initial temperatures");
  simulate->add_option("--dt", sim_dt, "control step, seconds");
  simulate->add_option("--out", sim_out, "trace CSV path")->default_str("<run dir>/trace.csv");

  ConfigFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "train an agent, then evaluate it on the held-out weather");
  train_flags.attach(*train_cmd);

  ConfigFlags eval_flags;
  std::string artifact_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "greedy evaluation of a saved agent");
  eval_cmd->add_option("--agent-artifact", artifact_path, "agent.qtable or agent.dqn from `train`")->required();
  eval_flags.attach(*eval_cmd, false);

  ConfigFlags ablate_flags;
  std::string suite = "obs";
  int jobs = 1;
  auto* ablate_cmd = app.add_subcommand("ablate", "run an ablation suite");
  ablate_cmd->add_option("--suite", suite, "obs | reward | tiles | baseline")
      ->check(CLI::IsMember({"obs", "reward", "tiles", "baseline"}));
  ablate_cmd->add_option("--jobs", jobs, "worker threads");
  ablate_flags.attach(*ablate_cmd);

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "median table over every results.csv under a directory");
  report_cmd->add_option("--dir", report_dir, "directory to scan")->required();

  auto* schema_cmd = app.add_subcommand("schema", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_env, sim_weather, sim_action, sim_hours, sim_seed, sim_dt, sim_out, out);
    if (*train_cmd) return cmd_train(train_flags, out);
    if (*eval_cmd) return cmd_evaluate(eval_flags, artifact_path, out);
    if (*ablate_cmd) return cmd_ablate(ablate_flags, suite, jobs, out);
    if (*report_cmd) return cmd_report(report_dir, out);
    if (*schema_cmd) {
      out << config_schema().dump(2) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error [IoFailure]: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace hvacrl
