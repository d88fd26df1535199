#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace hvacrl {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  bool operator==(const DenseLayer& o) const { return weight == o.weight && bias == o.bias; }
};

/// Feed-forward network: ReLU after every layer except the last.
struct MLPParams {
  std::vector<DenseLayer> layers;

  Eigen::Index input_dim() const { return layers.front().weight.cols(); }
  Eigen::Index output_dim() const { return layers.back().weight.rows(); }
  bool operator==(const MLPParams&) const = default;

  /// Zero-valued parameters with the same shapes.
  MLPParams zeros_like() const;
  Eigen::Index parameter_count() const;
  bool all_finite() const;
};

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
MLPParams init_mlp(std::span<const int> dims, std::mt19937_64& rng);

Eigen::VectorXd forward(const MLPParams& params, std::span<const double> x);

/// Columns of `inputs` are samples; returns one column of outputs per sample.
Eigen::MatrixXd forward_batch(const MLPParams& params, const Eigen::MatrixXd& inputs);

enum class LossKind { Squared, Huber };

/// Mean over samples of loss(Q(x_i)[a_i] - y_i).
double action_loss(const MLPParams& params, const Eigen::MatrixXd& inputs, std::span<const int> actions,
                   std::span<const double> targets, LossKind loss = LossKind::Squared);

/// Exact gradient of action_loss by backpropagation.
MLPParams action_loss_gradient(const MLPParams& params, const Eigen::MatrixXd& inputs,
                               std::span<const int> actions, std::span<const double> targets,
                               LossKind loss = LossKind::Squared);

enum class OptimizerKind { PlainGradient, AdaptiveMoment };

/// Gradient-descent optimizer; Adam when AdaptiveMoment.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(MLPParams& params, const MLPParams& grads);
  std::int64_t steps() const noexcept { return t_; }

 private:
  OptimizerKind kind_;
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t t_ = 0;
  MLPParams m_, v_;
};

/// Flat little-endian checkpoint:
///   "HVQN" | u32 version=1 | u32 layer_count |
///   per layer: u32 out, u32 in |
///   per layer: out*in f64 weights (row-major), out f64 biases
void save_mlp(std::ostream& out, const MLPParams& params);
MLPParams load_mlp(std::istream& in);

}  // namespace hvacrl
