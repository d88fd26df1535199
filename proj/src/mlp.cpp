#include "hvacrl/mlp.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "hvacrl/error.hpp"

namespace hvacrl {

MLPParams MLPParams::zeros_like() const {
  MLPParams z;
  for (const auto& l : layers) {
    z.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

Eigen::Index MLPParams::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool MLPParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

MLPParams init_mlp(std::span<const int> dims, std::mt19937_64& rng) {
  if (dims.size() < 2) throw Error(Errc::DimensionMismatch, "network needs at least input and output dims");
  MLPParams p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    if (fan_in <= 0 || fan_out <= 0) throw Error(Errc::DimensionMismatch, "layer widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    // Fill row-major so the draw order matches the checkpoint layout.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = u(rng);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Eigen::MatrixXd forward_batch(const MLPParams& params, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != params.input_dim()) {
    throw Error(Errc::DimensionMismatch, "input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                                             std::to_string(params.input_dim()));
  }
  Eigen::MatrixXd h = inputs;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    Eigen::MatrixXd z = l.weight * h;
    z.colwise() += l.bias;
    if (i + 1 < params.layers.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd forward(const MLPParams& params, std::span<const double> x) {
  const Eigen::Map<const Eigen::VectorXd> in(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward_batch(params, Eigen::MatrixXd(in)).col(0);
}

namespace {

constexpr double kHuberDelta = 1.0;

void check_batch(const Eigen::MatrixXd& inputs, std::span<const int> actions, std::span<const double> targets,
                 Eigen::Index outputs) {
  const auto n = static_cast<std::size_t>(inputs.cols());
  if (actions.size() != n || targets.size() != n) {
    throw Error(Errc::DimensionMismatch, "batch, action and target lengths differ");
  }
  for (int a : actions) {
    if (a < 0 || a >= outputs) throw Error(Errc::ActionOutOfRange, "action " + std::to_string(a));
  }
}

double loss_value(double err, LossKind kind) {
  if (kind == LossKind::Squared) return err * err;
  const double a = std::abs(err);
  return a <= kHuberDelta ? 0.5 * err * err : kHuberDelta * (a - 0.5 * kHuberDelta);
}

double loss_slope(double err, LossKind kind) {
  if (kind == LossKind::Squared) return 2.0 * err;
  return std::clamp(err, -kHuberDelta, kHuberDelta);
}

}  // namespace

double action_loss(const MLPParams& params, const Eigen::MatrixXd& inputs, std::span<const int> actions,
                   std::span<const double> targets, LossKind loss) {
  check_batch(inputs, actions, targets, params.output_dim());
  const Eigen::MatrixXd q = forward_batch(params, inputs);
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    total += loss_value(q(actions[k], i) - targets[k], loss);
  }
  return total / static_cast<double>(q.cols());
}

MLPParams action_loss_gradient(const MLPParams& params, const Eigen::MatrixXd& inputs,
                               std::span<const int> actions, std::span<const double> targets, LossKind loss) {
  check_batch(inputs, actions, targets, params.output_dim());
  const std::size_t n_layers = params.layers.size();
  const auto batch = static_cast<double>(inputs.cols());

  // Forward pass keeping every layer's input activation.
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(n_layers + 1);
  acts.push_back(inputs);
  for (std::size_t i = 0; i < n_layers; ++i) {
    const auto& l = params.layers[i];
    Eigen::MatrixXd z = l.weight * acts.back();
    z.colwise() += l.bias;
    if (i + 1 < n_layers) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }

  // dL/d(output): nonzero only at the taken action.
  const Eigen::MatrixXd& q = acts.back();
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    delta(actions[k], i) = loss_slope(q(actions[k], i) - targets[k], loss) / batch;
  }

  MLPParams grads = params.zeros_like();
  for (std::size_t li = n_layers; li-- > 0;) {
    const auto& l = params.layers[li];
    grads.layers[li].weight.noalias() = delta * acts[li].transpose();
    grads.layers[li].bias = delta.rowwise().sum();
    if (li == 0) break;
    Eigen::MatrixXd back = l.weight.transpose() * delta;
    // ReLU derivative; acts[li] is the post-activation of layer li-1.
    delta = back.cwiseProduct((acts[li].array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

Optimizer::Optimizer(OptimizerKind kind, double lr, double beta1, double beta2, double epsilon)
    : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (!(lr > 0.0)) throw Error(Errc::InvalidConfig, "learning rate must be > 0");
}

void Optimizer::step(MLPParams& params, const MLPParams& grads) {
  ++t_;
  if (kind_ == OptimizerKind::PlainGradient) {
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
      params.layers[i].weight -= lr_ * grads.layers[i].weight;
      params.layers[i].bias -= lr_ * grads.layers[i].bias;
    }
    return;
  }
  if (m_.layers.empty()) {
    m_ = params.zeros_like();
    v_ = params.zeros_like();
  }
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  // Bias-corrected form with epsilon applied to the corrected second moment.
  auto apply = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p.array() -= step * m.array() / (v.array().sqrt() + epsilon_ * std::sqrt(c2));
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    apply(params.layers[i].weight, m_.layers[i].weight, v_.layers[i].weight, grads.layers[i].weight);
    apply(params.layers[i].bias, m_.layers[i].bias, v_.layers[i].bias, grads.layers[i].bias);
  }
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ostream& out, double d) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &d, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(Errc::IoFailure, "truncated network checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(Errc::IoFailure, "truncated network checkpoint");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d = 0.0;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

constexpr char kMagic[4] = {'H', 'V', 'Q', 'N'};

}  // namespace

void save_mlp(std::ostream& out, const MLPParams& params) {
  out.write(kMagic, 4);
  write_u32(out, 1);
  write_u32(out, static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& l : params.layers) {
    write_u32(out, static_cast<std::uint32_t>(l.weight.rows()));
    write_u32(out, static_cast<std::uint32_t>(l.weight.cols()));
  }
  for (const auto& l : params.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) write_f64(out, l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) write_f64(out, l.bias(r));
  }
  if (!out) throw Error(Errc::IoFailure, "failed writing network checkpoint");
}

MLPParams load_mlp(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(Errc::IoFailure, "not a network checkpoint");
  }
  if (read_u32(in) != 1) throw Error(Errc::IoFailure, "unsupported checkpoint version");
  const std::uint32_t n = read_u32(in);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto rows = read_u32(in);
    const auto cols = read_u32(in);
    dims.emplace_back(rows, cols);
  }
  MLPParams p;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto [rows, cols] = dims[i];
    if (i > 0 && cols != dims[i - 1].first) throw Error(Errc::DimensionMismatch, "checkpoint layers do not chain");
    DenseLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) l.weight(r, c) = read_f64(in);
    }
    for (std::uint32_t r = 0; r < rows; ++r) l.bias(r) = read_f64(in);
    p.layers.push_back(std::move(l));
  }
  return p;
}

}  // namespace hvacrl
