#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "hvacrl/error.hpp"
#include "hvacrl/harness.hpp"

namespace hvacrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Canonical config JSON minus fields that do not affect results.
json snapshot(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  return j;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string slug(std::string s) {
  for (auto& c : s) {
    if (c == '+') c = '-';
  }
  return s;
}

void check_stream(const std::ios& s, const fs::path& p) {
  if (!s) throw Error(Errc::IoFailure, "cannot write " + p.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string run_name(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.agent) << '_' << to_string(cfg.building) << "_w" << fmt_num(cfg.reward.omega) << '_'
     << slug(cfg.effective_groups().to_string());
  if (cfg.agent == AgentKind::QLearning) os << "_t" << fmt_num(cfg.tile_width);
  if (cfg.agent == AgentKind::Fixed) os << "_a" << cfg.fixed_action;
  os << "_s" << cfg.seed << '_' << config_hash(cfg);
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = snapshot(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path save_artifact(const AgentArtifact& artifact, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  if (const auto* tab = std::get_if<TabularPolicy>(&artifact)) {
    const fs::path p = dir / "agent.qtable";
    std::ofstream out(p);
    check_stream(out, p);
    save_qtable(out, tab->table, tab->tiles);
    out.flush();
    check_stream(out, p);
    return p;
  }
  const fs::path p = dir / "agent.dqn";
  std::ofstream out(p, std::ios::binary);
  check_stream(out, p);
  save_mlp(out, std::get<NetworkPolicy>(artifact).params);
  out.flush();
  check_stream(out, p);
  return p;
}

AgentArtifact load_artifact(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + file.string());
  char magic[4] = {};
  in.read(magic, 4);
  in.clear();
  in.seekg(0);
  if (std::string(magic, 4) == "HVQN") return NetworkPolicy{load_mlp(in)};
  auto [table, tiles] = load_qtable(in);
  return TabularPolicy{std::move(table), std::move(tiles)};
}

void write_results(const std::vector<ResultRecord>& records, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "curves", ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  {
    const fs::path p = dir / "results.csv";
    std::ofstream csv(p);
    check_stream(csv, p);
    csv << kResultsCsvHeader << '\n' << std::setprecision(17);
    for (const auto& r : records) {
      const auto& c = r.config;
      csv << config_hash(c) << ',' << to_string(c.agent) << ',' << to_string(c.building) << ',' << c.reward.omega
          << ',' << c.effective_groups().to_string() << ',' << c.tile_width << ',' << c.seed << ','
          << r.metrics.energy_kwh << ',' << r.metrics.violation_pct << '\n';
    }
    check_stream(csv, p);
  }
  {
    json arr = json::array();
    for (const auto& r : records) {
      arr.push_back({
          {"run", r.run},
          {"config_hash", config_hash(r.config)},
          {"config", snapshot(r.config)},
          {"observation_groups", r.config.effective_groups().to_string()},
          {"seed", r.config.seed},
          {"code_version", r.code_version},
          {"metrics",
           {{"energy_kwh", r.metrics.energy_kwh},
            {"violation_pct", r.metrics.violation_pct},
            {"mean_eval_reward", r.metrics.mean_eval_reward},
            {"episode_returns", r.metrics.episode_returns}}},
      });
    }
    const fs::path p = dir / "results.json";
    std::ofstream out(p);
    check_stream(out, p);
    out << arr.dump(2) << '\n';
    check_stream(out, p);
  }
  {
    // Wall-clock varies between runs, so it lives outside results.json.
    const fs::path p = dir / "timings.csv";
    std::ofstream out(p);
    check_stream(out, p);
    out << "run,wall_clock_s\n";
    for (const auto& r : records) out << r.run << ',' << r.wall_clock_s << '\n';
    check_stream(out, p);
  }
  for (const auto& r : records) {
    const fs::path p = dir / "curves" / (r.run + ".csv");
    std::ofstream out(p);
    check_stream(out, p);
    out << "episode,mean_reward\n" << std::setprecision(17);
    for (std::size_t e = 0; e < r.metrics.episode_returns.size(); ++e) {
      out << e << ',' << r.metrics.episode_returns[e] << '\n';
    }
    check_stream(out, p);
  }
}

std::vector<ResultRow> read_results_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw Error(Errc::IoFailure, file.string() + ": unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) {
      throw Error(Errc::IoFailure, file.string() + ":" + std::to_string(line_no) + ": expected 9 fields");
    }
    try {
      ResultRow r;
      r.config_hash = f[0];
      r.agent = f[1];
      r.building = f[2];
      r.omega = std::stod(f[3]);
      r.groups = f[4];
      r.tile_width = std::stod(f[5]);
      r.seed = std::stoull(f[6]);
      r.energy_kwh = std::stod(f[7]);
      r.violation_pct = std::stod(f[8]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(Errc::IoFailure, file.string() + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::InvalidConfig, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, double, double>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  std::vector<Key> order;
  for (const auto& r : rows) {
    // Tile width only distinguishes tabular runs.
    const double tw = r.agent == "qlearning" ? r.tile_width : 0.0;
    Key k{r.agent, r.building, r.groups, r.omega, tw};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.first.push_back(r.energy_kwh);
    it->second.second.push_back(r.violation_pct);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& [e, v] = groups.at(k);
    SummaryRow s;
    std::tie(s.agent, s.building, s.groups, s.omega, s.tile_width) = k;
    s.runs = e.size();
    s.median_energy_kwh = median(e);
    s.median_violation_pct = median(v);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hvacrl
