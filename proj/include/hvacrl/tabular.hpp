#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hvacrl/env.hpp"

namespace hvacrl {

/// Uniform bands over one observation variable. Values outside [lo, hi)
/// fall into the edge bins.
struct TileVar {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  double width = 1.0;

  std::size_t bins() const;
  bool operator==(const TileVar&) const = default;
};

/// A single tiling (state aggregation) over an ordered list of variables.
class TileCodingSpec {
 public:
  TileCodingSpec() = default;
  explicit TileCodingSpec(std::vector<TileVar> vars);

  const std::vector<TileVar>& vars() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  /// Product of bin counts, saturating at UINT64_MAX.
  std::uint64_t cardinality() const noexcept;

  bool operator==(const TileCodingSpec&) const = default;

 private:
  std::vector<TileVar> vars_;
};

/// Tiling for an observation spec: temperatures at `temp_width` degC,
/// humidities at `humidity_width` %, weather nuisance variables (wind, solar)
/// and clothing as one band.
TileCodingSpec default_tile_spec(const ObservationSpec& spec, double temp_width = 5.0,
                                 double humidity_width = 10.0);

struct DiscreteState {
  std::vector<std::uint32_t> bins;
  std::uint64_t flat = 0;  // mixed radix, first variable least significant

  bool operator==(const DiscreteState&) const = default;
};

DiscreteState encode(const Observation& obs, const TileCodingSpec& spec);

/// Centre of each band of `s`, for inspection and tests.
Observation bin_centers(const DiscreteState& s, const TileCodingSpec& spec);

struct QLearningConfig {
  double alpha = 1.0e-4;
  double gamma = 0.99;
  double eps_init = 1.0;
  double eps_rate = 0.12;  // linear decrement per completed episode
  double eps_final = 0.1;
  std::uint64_t memory_cap = 20'000'000'000ULL;  // Q-table entries (states x actions)

  void validate() const;
};

/// Sparse Q(s, a) with implicit zeros. Rows are allocated on first write.
class QTable {
 public:
  using Row = std::array<double, kNumActions>;

  explicit QTable(std::uint64_t memory_cap = QLearningConfig{}.memory_cap) : cap_(memory_cap) {}

  double value(std::uint64_t state, int action) const;
  /// Row for `state`, or all zeros.
  Row row(std::uint64_t state) const;
  double max_value(std::uint64_t state) const;
  void set(std::uint64_t state, int action, double value);

  std::size_t visited_states() const noexcept { return rows_.size(); }
  std::uint64_t entry_count() const noexcept { return rows_.size() * static_cast<std::uint64_t>(kNumActions); }
  std::uint64_t memory_cap() const noexcept { return cap_; }
  const std::unordered_map<std::uint64_t, Row>& rows() const noexcept { return rows_; }

 private:
  std::uint64_t cap_;
  std::unordered_map<std::uint64_t, Row> rows_;
};

/// Index of the largest entry; ties go to the lowest index.
int argmax_action(const QTable::Row& row);

int select_action(const QTable& q, const DiscreteState& s, double eps, std::mt19937_64& rng);

/// One tabular Q-learning backup of (s, a, r, s').
void update(QTable& q, const DiscreteState& s, int a, double r, const DiscreteState& s_next,
            const QLearningConfig& cfg);

double anneal_eps(int episode, const QLearningConfig& cfg);

/// Throws StateSpaceTooLarge when the dense table size would exceed `cap`.
void state_space_guard(const TileCodingSpec& spec, int n_actions, std::uint64_t cap);

/// Text artifact: tiling header followed by "state action value" triples.
void save_qtable(std::ostream& out, const QTable& q, const TileCodingSpec& spec);
std::pair<QTable, TileCodingSpec> load_qtable(std::istream& in);

}  // namespace hvacrl
