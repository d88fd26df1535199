#include "hvacrl/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "hvacrl/error.hpp"

namespace hvacrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::InvalidConfig, "replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity_, 1u << 20));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
  const std::size_t fill = items_.size();
  if (n == 0 || fill < n) {
    throw Error(Errc::BufferTooSmall, "need " + std::to_string(n) + " transitions, buffer holds " +
                                          std::to_string(fill));
  }
  // Floyd's subset sampling, then a shuffle so the minibatch order is uniform too.
  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (std::size_t j = fill - n; j < fill; ++j) {
    std::uniform_int_distribution<std::size_t> u(0, j);
    const std::size_t t = u(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
    else picked.push_back(j);
  }
  std::shuffle(picked.begin(), picked.end(), rng);
  return picked;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<Transition> out;
  for (auto i : sample_indices(n, rng)) out.push_back(items_[i]);
  return out;
}

Normalizer::Normalizer(const ObservationSpec& spec) {
  for (const auto& v : spec.vars()) {
    lo_.push_back(v.lo);
    hi_.push_back(v.hi);
  }
}

Normalizer::Normalizer(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw Error(Errc::DimensionMismatch, "normalizer bounds differ in length");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i])) throw Error(Errc::InvalidConfig, "normalizer needs lo < hi");
  }
}

Observation Normalizer::normalize(const Observation& x) const {
  if (x.size() != lo_.size()) throw Error(Errc::DimensionMismatch, "observation length differs from normalizer");
  Observation u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lo_[i]) / (hi_[i] - lo_[i]);
  return u;
}

Observation Normalizer::denormalize(const Observation& u) const {
  if (u.size() != lo_.size()) throw Error(Errc::DimensionMismatch, "observation length differs from normalizer");
  Observation x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo_[i] + u[i] * (hi_[i] - lo_[i]);
  return x;
}

void DQNConfig::validate() const {
  if (!(lr > 0.0) || !(gamma > 0.0 && gamma <= 1.0)) throw Error(Errc::InvalidConfig, "dqn lr/gamma out of range");
  if (batch_size == 0 || batch_size > buffer_capacity) {
    throw Error(Errc::InvalidConfig, "dqn batch_size must lie in [1, buffer_capacity]");
  }
  if (target_sync_interval < 1 || train_frequency < 1) {
    throw Error(Errc::InvalidConfig, "dqn intervals must be >= 1");
  }
  if (!(eps_final >= 0.0 && eps_init <= 1.0 && eps_final <= eps_init) ||
      !(exploration_fraction > 0.0 && exploration_fraction <= 1.0)) {
    throw Error(Errc::InvalidConfig, "dqn epsilon schedule out of range");
  }
  for (int h : hidden) {
    if (h <= 0) throw Error(Errc::InvalidConfig, "hidden widths must be positive");
  }
}

double dqn_epsilon(std::int64_t step, std::int64_t total_steps, const DQNConfig& cfg) {
  const double horizon = cfg.exploration_fraction * static_cast<double>(std::max<std::int64_t>(total_steps, 1));
  const double progress = std::min(1.0, static_cast<double>(std::max<std::int64_t>(step, 0)) / horizon);
  return (1.0 - progress) * cfg.eps_init + progress * cfg.eps_final;
}

namespace {

Eigen::MatrixXd stack(std::span<const Transition> batch, bool next) {
  const auto dim = static_cast<Eigen::Index>(next ? batch.front().s_next.size() : batch.front().s.size());
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i].s_next : batch[i].s;
    if (static_cast<Eigen::Index>(v.size()) != dim) throw Error(Errc::DimensionMismatch, "ragged batch");
    for (Eigen::Index r = 0; r < dim; ++r) m(r, static_cast<Eigen::Index>(i)) = v[static_cast<std::size_t>(r)];
  }
  return m;
}

std::vector<int> actions_of(std::span<const Transition> batch) {
  std::vector<int> a;
  a.reserve(batch.size());
  for (const auto& t : batch) a.push_back(t.a);
  return a;
}

}  // namespace

std::vector<double> compute_targets(std::span<const Transition> batch, const MLPParams& target_params,
                                    double gamma) {
  if (batch.empty()) throw Error(Errc::DimensionMismatch, "empty batch");
  const Eigen::MatrixXd q_next = forward_batch(target_params, stack(batch, true));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch[i].r;
    if (!batch[i].terminal) y[i] += gamma * q_next.col(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return y;
}

MLPParams gradient(const MLPParams& params, std::span<const Transition> batch, std::span<const double> y,
                   LossKind loss) {
  if (batch.empty() || y.size() != batch.size()) {
    throw Error(Errc::DimensionMismatch, "targets must match batch length");
  }
  const auto actions = actions_of(batch);
  return action_loss_gradient(params, stack(batch, false), actions, y, loss);
}

double batch_loss(const MLPParams& params, std::span<const Transition> batch, std::span<const double> y,
                  LossKind loss) {
  if (batch.empty() || y.size() != batch.size()) {
    throw Error(Errc::DimensionMismatch, "targets must match batch length");
  }
  const auto actions = actions_of(batch);
  return action_loss(params, stack(batch, false), actions, y, loss);
}

int greedy_action(const MLPParams& params, std::span<const double> x) {
  const Eigen::VectorXd q = forward(params, x);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return static_cast<int>(best);
}

namespace {

MLPParams make_network(std::size_t input_dim, const DQNConfig& cfg, std::mt19937_64& rng) {
  std::vector<int> dims{static_cast<int>(input_dim)};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(kNumActions);
  return init_mlp(dims, rng);
}

}  // namespace

DQNAgent::DQNAgent(Normalizer normalizer, DQNConfig cfg, std::uint64_t seed)
    : normalizer_(std::move(normalizer)),
      cfg_(std::move(cfg)),
      rng_(seed),
      online_(make_network(normalizer_.size(), cfg_, rng_)),
      target_(online_),
      buffer_(cfg_.buffer_capacity),
      optimizer_(cfg_.optimizer, cfg_.lr, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_epsilon) {
  cfg_.validate();
}

DQNAgent::DQNAgent(Normalizer normalizer, MLPParams params, DQNConfig cfg)
    : normalizer_(std::move(normalizer)),
      cfg_(std::move(cfg)),
      rng_(0),
      online_(std::move(params)),
      target_(online_),
      buffer_(1),
      optimizer_(cfg_.optimizer, cfg_.lr) {
  if (static_cast<std::size_t>(online_.input_dim()) != normalizer_.size() || online_.output_dim() != kNumActions) {
    throw Error(Errc::DimensionMismatch, "network shape does not match observation/action spaces");
  }
}

int DQNAgent::act(const Observation& obs, double eps, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < eps) {
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    return pick(rng);
  }
  return greedy_action(online_, normalizer_.normalize(obs));
}

void DQNAgent::remember(const Observation& obs, int a, double r, const Observation& next, bool terminal) {
  buffer_.push(Transition{normalizer_.normalize(obs), a, r, normalizer_.normalize(next), terminal});
}

void DQNAgent::train_step(std::int64_t env_step_count) {
  if (buffer_.size() >= cfg_.learning_starts && env_step_count % cfg_.train_frequency == 0) {
    const auto batch = buffer_.sample(cfg_.batch_size, rng_);
    const auto y = compute_targets(batch, target_, cfg_.gamma);
    optimizer_.step(online_, gradient(online_, batch, y, cfg_.loss));
  }
  if (env_step_count % cfg_.target_sync_interval == 0) target_ = online_;
}

}  // namespace hvacrl
