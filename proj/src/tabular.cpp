#include "hvacrl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "hvacrl/error.hpp"

namespace hvacrl {

std::size_t TileVar::bins() const {
  return static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / width - 1e-9)));
}

TileCodingSpec::TileCodingSpec(std::vector<TileVar> vars) : vars_(std::move(vars)) {
  for (const auto& v : vars_) {
    if (!(v.lo < v.hi) || !(v.width > 0.0)) {
      throw Error(Errc::InvalidConfig, "tile variable '" + v.name + "' needs lo < hi and width > 0");
    }
  }
}

std::uint64_t TileCodingSpec::cardinality() const noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (const auto& v : vars_) {
    const auto b = static_cast<std::uint64_t>(v.bins());
    if (n > kMax / b) return kMax;
    n *= b;
  }
  return n;
}

TileCodingSpec default_tile_spec(const ObservationSpec& spec, double temp_width, double humidity_width) {
  std::vector<TileVar> vars;
  for (const auto& v : spec.vars()) {
    TileVar t{v.name, v.lo, v.hi, v.hi - v.lo};
    switch (v.kind) {
      case VarKind::OutdoorTemperature: t = {v.name, -10.0, 40.0, temp_width}; break;
      case VarKind::ZoneTemperature: t = {v.name, 15.0, 30.0, temp_width}; break;
      case VarKind::Setpoint: t = {v.name, 15.0, 30.0, temp_width}; break;
      case VarKind::Humidity: t = {v.name, 30.0, 100.0, humidity_width}; break;
      case VarKind::Power: t.width = (v.hi - v.lo) / 5.0; break;
      case VarKind::Occupancy: t.width = (v.hi - v.lo) / 2.0; break;
      case VarKind::Discomfort: t.width = 25.0; break;
      case VarKind::WindSpeed:
      case VarKind::WindDirection:
      case VarKind::Solar:
      case VarKind::Clothing: break;
    }
    vars.push_back(t);
  }
  return TileCodingSpec(std::move(vars));
}

DiscreteState encode(const Observation& obs, const TileCodingSpec& spec) {
  if (obs.size() != spec.size()) {
    throw Error(Errc::SpecMismatch, "observation has " + std::to_string(obs.size()) +
                                        " values, tiling covers " + std::to_string(spec.size()));
  }
  DiscreteState s;
  s.bins.reserve(obs.size());
  std::uint64_t radix = 1;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& v = spec.vars()[i];
    const std::size_t n = v.bins();
    std::size_t b = 0;
    if (obs[i] >= v.lo) {
      b = std::min(static_cast<std::size_t>(std::floor((obs[i] - v.lo) / v.width)), n - 1);
    }
    s.bins.push_back(static_cast<std::uint32_t>(b));
    s.flat += radix * b;
    radix *= n;
  }
  return s;
}

Observation bin_centers(const DiscreteState& s, const TileCodingSpec& spec) {
  Observation out;
  for (std::size_t i = 0; i < s.bins.size(); ++i) {
    const auto& v = spec.vars()[i];
    const double lo = v.lo + v.width * s.bins[i];
    const double hi = std::min(lo + v.width, v.hi);
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

void QLearningConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidConfig, "alpha must lie in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(Errc::InvalidConfig, "gamma must lie in (0,1]");
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(eps_init) || !unit(eps_final) || !(eps_rate >= 0.0) || eps_final > eps_init) {
    throw Error(Errc::InvalidConfig, "epsilon schedule out of range");
  }
}

double QTable::value(std::uint64_t state, int action) const {
  const auto it = rows_.find(state);
  return it == rows_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
}

QTable::Row QTable::row(std::uint64_t state) const {
  const auto it = rows_.find(state);
  return it == rows_.end() ? Row{} : it->second;
}

double QTable::max_value(std::uint64_t state) const {
  const auto it = rows_.find(state);
  if (it == rows_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

void QTable::set(std::uint64_t state, int action, double value) {
  if (!std::isfinite(value)) throw Error(Errc::InvalidConfig, "non-finite Q value");
  auto it = rows_.find(state);
  if (it == rows_.end()) {
    if (entry_count() + kNumActions > cap_) {
      throw Error(Errc::MemoryCapExceeded, "Q-table would exceed " + std::to_string(cap_) + " entries");
    }
    it = rows_.emplace(state, Row{}).first;
  }
  it->second[static_cast<std::size_t>(action)] = value;
}

int argmax_action(const QTable::Row& row) {
  return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
}

int select_action(const QTable& q, const DiscreteState& s, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < eps) {
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    return pick(rng);
  }
  return argmax_action(q.row(s.flat));
}

void update(QTable& q, const DiscreteState& s, int a, double r, const DiscreteState& s_next,
            const QLearningConfig& cfg) {
  if (a < 0 || a >= kNumActions) throw Error(Errc::ActionOutOfRange, "action " + std::to_string(a));
  if (!std::isfinite(r)) throw Error(Errc::InvalidConfig, "non-finite reward");
  const double current = q.value(s.flat, a);
  const double target = r + cfg.gamma * q.max_value(s_next.flat);
  const double next = current + cfg.alpha * (target - current);
  if (next == current && q.rows().find(s.flat) == q.rows().end()) return;  // keep zeros implicit
  q.set(s.flat, a, next);
}

double anneal_eps(int episode, const QLearningConfig& cfg) {
  return std::max(cfg.eps_final, cfg.eps_init - cfg.eps_rate * static_cast<double>(std::max(episode, 0)));
}

void state_space_guard(const TileCodingSpec& spec, int n_actions, std::uint64_t cap) {
  const std::uint64_t states = spec.cardinality();
  const auto actions = static_cast<std::uint64_t>(std::max(n_actions, 1));
  const bool overflow = states > std::numeric_limits<std::uint64_t>::max() / actions;
  if (overflow || states * actions > cap) {
    throw Error(Errc::StateSpaceTooLarge,
                std::to_string(spec.size()) + " tiled variables give " +
                    (overflow ? std::string("more than 2^64") : std::to_string(states * actions)) +
                    " Q entries, cap is " + std::to_string(cap));
  }
}

// Format:
//   hvacrl-qtable 1
//   actions <n>
//   cap <memory_cap>
//   vars <k>
//   <name> <lo> <hi> <width>        (k lines)
//   entries <m>
//   <state> <action> <value>        (m lines, sorted)
void save_qtable(std::ostream& out, const QTable& q, const TileCodingSpec& spec) {
  out << std::setprecision(17);
  out << "hvacrl-qtable 1\n";
  out << "actions " << kNumActions << "\n";
  out << "cap " << q.memory_cap() << "\n";
  out << "vars " << spec.size() << "\n";
  for (const auto& v : spec.vars()) out << v.name << ' ' << v.lo << ' ' << v.hi << ' ' << v.width << "\n";

  std::vector<std::uint64_t> states;
  states.reserve(q.rows().size());
  for (const auto& [s, row] : q.rows()) states.push_back(s);
  std::sort(states.begin(), states.end());
  out << "entries " << states.size() * kNumActions << "\n";
  for (auto s : states) {
    const auto& row = q.rows().at(s);
    for (int a = 0; a < kNumActions; ++a) out << s << ' ' << a << ' ' << row[static_cast<std::size_t>(a)] << "\n";
  }
  if (!out) throw Error(Errc::IoFailure, "failed writing Q-table");
}

std::pair<QTable, TileCodingSpec> load_qtable(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key) throw Error(Errc::IoFailure, std::string("Q-table artifact: expected '") + key + "'");
  };
  expect("hvacrl-qtable");
  int version = 0;
  in >> version;
  if (version != 1) throw Error(Errc::IoFailure, "unsupported Q-table version");
  expect("actions");
  int actions = 0;
  in >> actions;
  if (actions != kNumActions) throw Error(Errc::IoFailure, "Q-table action count mismatch");
  expect("cap");
  std::uint64_t cap = 0;
  in >> cap;
  expect("vars");
  std::size_t k = 0;
  in >> k;
  std::vector<TileVar> vars(k);
  for (auto& v : vars) in >> v.name >> v.lo >> v.hi >> v.width;
  expect("entries");
  std::size_t m = 0;
  in >> m;
  if (!in) throw Error(Errc::IoFailure, "truncated Q-table header");
  QTable q(cap);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t s = 0;
    int a = 0;
    double value = 0.0;
    if (!(in >> s >> a >> value)) throw Error(Errc::IoFailure, "truncated Q-table entries");
    q.set(s, a, value);
  }
  return {std::move(q), TileCodingSpec(std::move(vars))};
}

}  // namespace hvacrl
