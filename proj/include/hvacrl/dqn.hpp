#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "hvacrl/env.hpp"
#include "hvacrl/mlp.hpp"

namespace hvacrl {

struct Transition {
  Observation s;  // normalized
  int a = 0;
  double r = 0.0;
  Observation s_next;  // normalized
  bool terminal = false;
};

/// Fixed-capacity FIFO store of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  /// `n` distinct indices drawn uniformly.
  std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

  const Transition& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t cursor() const noexcept { return cursor_; }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

/// Min-max scaling from an ObservationSpec's ranges.
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(const ObservationSpec& spec);
  Normalizer(std::vector<double> lo, std::vector<double> hi);

  Observation normalize(const Observation& x) const;
  Observation denormalize(const Observation& u) const;
  std::size_t size() const noexcept { return lo_.size(); }

 private:
  std::vector<double> lo_, hi_;
};

struct DQNConfig {
  double lr = 1.0e-4;
  double gamma = 0.99;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 100'000;
  std::int64_t target_sync_interval = 10'000;
  std::int64_t train_frequency = 4;
  std::size_t learning_starts = 1'000;
  double eps_init = 1.0;
  double eps_final = 0.05;
  double exploration_fraction = 0.1;
  std::vector<int> hidden = {64, 64};
  OptimizerKind optimizer = OptimizerKind::AdaptiveMoment;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1.0e-8;
  LossKind loss = LossKind::Squared;

  void validate() const;
};

/// Linear decay from eps_init to eps_final over the first
/// exploration_fraction of `total_steps`, flat afterwards.
double dqn_epsilon(std::int64_t step, std::int64_t total_steps, const DQNConfig& cfg);

/// Bootstrapped targets from the target network; terminal samples use r only.
std::vector<double> compute_targets(std::span<const Transition> batch, const MLPParams& target_params,
                                    double gamma);

/// Gradient of the batch-mean squared TD error w.r.t. `params`.
MLPParams gradient(const MLPParams& params, std::span<const Transition> batch, std::span<const double> y,
                   LossKind loss = LossKind::Squared);
double batch_loss(const MLPParams& params, std::span<const Transition> batch, std::span<const double> y,
                  LossKind loss = LossKind::Squared);

/// Greedy action for already-normalized input; ties go to the lowest index.
int greedy_action(const MLPParams& params, std::span<const double> x);

/// Online network, target network, replay memory and optimizer.
class DQNAgent {
 public:
  DQNAgent(Normalizer normalizer, DQNConfig cfg, std::uint64_t seed);
  /// Frozen agent for evaluation.
  DQNAgent(Normalizer normalizer, MLPParams params, DQNConfig cfg = {});

  int act(const Observation& obs, double eps, std::mt19937_64& rng) const;
  void remember(const Observation& obs, int a, double r, const Observation& next, bool terminal);
  /// Called once per environment step with the running step count.
  void train_step(std::int64_t env_step_count);

  const MLPParams& online() const noexcept { return online_; }
  const MLPParams& target() const noexcept { return target_; }
  MLPParams& mutable_online() noexcept { return online_; }
  const ReplayBuffer& buffer() const noexcept { return buffer_; }
  const Normalizer& normalizer() const noexcept { return normalizer_; }
  const DQNConfig& config() const noexcept { return cfg_; }
  std::int64_t updates() const noexcept { return optimizer_.steps(); }

 private:
  Normalizer normalizer_;
  DQNConfig cfg_;
  std::mt19937_64 rng_;
  MLPParams online_;
  MLPParams target_;
  ReplayBuffer buffer_;
  Optimizer optimizer_;
};

}  // namespace hvacrl
