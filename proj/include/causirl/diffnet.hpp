#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace causirl {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

enum class LayerKind { dense, relu, batchnorm };

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  Eigen::Index fan_in = 0;   // feature count for batchnorm
  Eigen::Index fan_out = 0;  // feature count for batchnorm

  static LayerSpec dense(Eigen::Index in, Eigen::Index out) { return {LayerKind::dense, in, out}; }
  static LayerSpec relu() { return {LayerKind::relu, 0, 0}; }
  static LayerSpec batchnorm(Eigen::Index features) {
    return {LayerKind::batchnorm, features, features};
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class Mode { train, eval };

/// Gradients laid out exactly like `Mlp::params()`: for each dense layer its
/// weight (fan_in x fan_out) then bias (1 x fan_out); for each batchnorm
/// layer its scale then shift (1 x features).
struct GradientSet {
  std::vector<Matrix> tensors;

  bool all_finite() const;
  GradientSet& operator+=(const GradientSet& other);
};

struct BatchNormStats {
  RowVector running_mean;
  RowVector running_var;
};

/// Feed-forward network of dense / ReLU / batchnorm layers with hand-written
/// reverse mode. A train-mode `forward` records what `backward` needs; the
/// two calls must alternate.
class Mlp {
 public:
  static constexpr double kBatchNormEps = 1e-5;
  static constexpr double kBatchNormMomentum = 0.1;

  /// Weights uniform in +-1/sqrt(fan_in), biases zero, batchnorm scale 1 and
  /// shift 0, running mean 0 and variance 1. Throws ConfigError if the layer
  /// dimensions do not chain.
  Mlp(std::vector<LayerSpec> specs, std::uint64_t seed);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }
  const std::vector<LayerSpec>& layers() const { return specs_; }

  Mode mode() const { return mode_; }
  void set_mode(Mode mode);

  /// Train mode: batch statistics, running-stat update, records activations.
  /// Eval mode: same as `infer`.
  Matrix forward(const Matrix& x);

  /// Eval-mode forward pass; never touches the model.
  Matrix infer(const Matrix& x) const;

  /// Reverse pass for the most recent train-mode `forward`, given the
  /// gradient of some scalar with respect to the network output. When
  /// `grad_input` is given it receives the gradient w.r.t. the input batch.
  GradientSet backward(const Matrix& grad_output, Matrix* grad_input = nullptr);

  /// forward + mean softmax cross-entropy + backward.
  std::pair<double, GradientSet> backward_loss(const Matrix& x, std::span<const int> labels);

  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  const std::vector<BatchNormStats>& batchnorm_stats() const { return bn_stats_; }

  GradientSet zero_gradients() const;

 private:
  struct LayerSlot {
    std::size_t param = 0;  // first tensor in params_ (dense, batchnorm)
    std::size_t bn = 0;     // index into bn_stats_ (batchnorm)
  };
  struct BatchNormCache {
    Matrix normalized;
    RowVector inv_std;
  };

  void check_input(const Matrix& x) const;

  std::vector<LayerSpec> specs_;
  std::vector<LayerSlot> slots_;
  std::vector<Matrix> params_;
  std::vector<BatchNormStats> bn_stats_;
  Eigen::Index input_dim_ = 0;
  Eigen::Index output_dim_ = 0;
  Mode mode_ = Mode::train;

  // Activations of the last train-mode forward, one input per layer.
  std::vector<Matrix> inputs_;
  std::vector<BatchNormCache> bn_cache_;
  bool has_cache_ = false;
};

struct LossAndGradient {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits
};

/// Mean over rows of -log softmax(logits + 1e-16)[label].
double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Same value as `cross_entropy` together with its gradient.
LossAndGradient softmax_cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Row-wise argmax.
std::vector<int> predict_classes(const Matrix& logits);

}  // namespace causirl
