#include "causirl/diffnet.hpp"

#include <cmath>
#include <string>

#include "causirl/error.hpp"
#include "causirl/rng.hpp"

namespace causirl {

bool GradientSet::all_finite() const {
  for (const auto& t : tensors) {
    if (!t.allFinite()) return false;
  }
  return true;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (other.tensors.size() != tensors.size()) {
    throw ShapeError("gradient sets have different tensor counts");
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].rows() != other.tensors[i].rows() ||
        tensors[i].cols() != other.tensors[i].cols()) {
      throw ShapeError("gradient tensor " + std::to_string(i) + " shape mismatch");
    }
    tensors[i] += other.tensors[i];
  }
  return *this;
}

Mlp::Mlp(std::vector<LayerSpec> specs, std::uint64_t seed) : specs_(std::move(specs)) {
  if (specs_.empty()) throw ConfigError("network needs at least one layer");

  Rng rng = Rng::substream(seed, "mlp-init");
  Eigen::Index width = 0;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& spec = specs_[i];
    LayerSlot slot;
    if (spec.kind == LayerKind::relu) {
      slots_.push_back(slot);
      continue;
    }
    if (spec.fan_in <= 0 || spec.fan_out <= 0) {
      throw ConfigError("layer " + std::to_string(i) + " has non-positive dimensions");
    }
    if (width == 0) {
      input_dim_ = spec.fan_in;
    } else if (spec.fan_in != width) {
      throw ConfigError("layer " + std::to_string(i) + " expects " + std::to_string(spec.fan_in) +
                        " inputs but the previous layer produces " + std::to_string(width));
    }
    width = spec.fan_out;
    slot.param = params_.size();
    if (spec.kind == LayerKind::dense) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
      Matrix weight(spec.fan_in, spec.fan_out);
      for (Eigen::Index r = 0; r < weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < weight.cols(); ++c) weight(r, c) = rng.uniform(-bound, bound);
      }
      params_.push_back(std::move(weight));
      params_.push_back(Matrix::Zero(1, spec.fan_out));
    } else {
      if (spec.fan_in != spec.fan_out) {
        throw ConfigError("batchnorm layer " + std::to_string(i) + " must keep its width");
      }
      params_.push_back(Matrix::Ones(1, spec.fan_in));
      params_.push_back(Matrix::Zero(1, spec.fan_in));
      slot.bn = bn_stats_.size();
      bn_stats_.push_back({RowVector::Zero(spec.fan_in), RowVector::Ones(spec.fan_in)});
    }
    slots_.push_back(slot);
  }
  if (width == 0) throw ConfigError("network has no dense or batchnorm layer");
  output_dim_ = width;
}

void Mlp::set_mode(Mode mode) {
  mode_ = mode;
  has_cache_ = false;
}

void Mlp::check_input(const Matrix& x) const {
  if (x.cols() != input_dim_) {
    throw ShapeError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(input_dim_));
  }
  if (x.rows() < 1) throw ShapeError("input batch is empty");
}

Matrix Mlp::infer(const Matrix& x) const {
  check_input(x);
  Matrix h = x;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSlot& slot = slots_[i];
    switch (specs_[i].kind) {
      case LayerKind::dense:
        h = (h * params_[slot.param]).rowwise() + params_[slot.param + 1].row(0);
        break;
      case LayerKind::relu:
        h = h.cwiseMax(0.0);
        break;
      case LayerKind::batchnorm: {
        const BatchNormStats& stats = bn_stats_[slot.bn];
        const RowVector scale = params_[slot.param].row(0).array() /
                                (stats.running_var.array() + kBatchNormEps).sqrt();
        const RowVector shift =
            params_[slot.param + 1].row(0).array() - stats.running_mean.array() * scale.array();
        h = (h.array().rowwise() * scale.array()).rowwise() + shift.array();
        break;
      }
    }
  }
  return h;
}

Matrix Mlp::forward(const Matrix& x) {
  if (mode_ == Mode::eval) return infer(x);
  check_input(x);
  const Eigen::Index n = x.rows();

  inputs_.assign(specs_.size(), Matrix());
  bn_cache_.assign(bn_stats_.size(), BatchNormCache());
  Matrix h = x;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSlot& slot = slots_[i];
    inputs_[i] = h;
    switch (specs_[i].kind) {
      case LayerKind::dense:
        h = (h * params_[slot.param]).rowwise() + params_[slot.param + 1].row(0);
        break;
      case LayerKind::relu:
        h = h.cwiseMax(0.0);
        break;
      case LayerKind::batchnorm: {
        if (n < 2) {
          has_cache_ = false;
          throw DegenerateBatchError("train-mode batchnorm needs at least 2 rows");
        }
        const RowVector mean = h.colwise().mean();
        const Matrix centered = h.rowwise() - mean;
        const RowVector var = centered.array().square().colwise().mean();
        const RowVector inv_std = (var.array() + kBatchNormEps).rsqrt();
        Matrix normalized = centered.array().rowwise() * inv_std.array();

        BatchNormStats& stats = bn_stats_[slot.bn];
        const double unbias = static_cast<double>(n) / static_cast<double>(n - 1);
        stats.running_mean = (1.0 - kBatchNormMomentum) * stats.running_mean + kBatchNormMomentum * mean;
        stats.running_var =
            (1.0 - kBatchNormMomentum) * stats.running_var + (kBatchNormMomentum * unbias) * var;

        h = (normalized.array().rowwise() * params_[slot.param].row(0).array()).rowwise() +
            params_[slot.param + 1].row(0).array();
        bn_cache_[slot.bn] = {std::move(normalized), inv_std};
        break;
      }
    }
  }
  has_cache_ = true;
  return h;
}

GradientSet Mlp::zero_gradients() const {
  GradientSet grads;
  grads.tensors.reserve(params_.size());
  for (const auto& p : params_) grads.tensors.push_back(Matrix::Zero(p.rows(), p.cols()));
  return grads;
}

GradientSet Mlp::backward(const Matrix& grad_output, Matrix* grad_input) {
  if (mode_ != Mode::train) throw ContractError("backward requires train mode");
  if (!has_cache_) throw ContractError("backward called without a preceding train-mode forward");
  const Eigen::Index n = inputs_.front().rows();
  if (grad_output.rows() != n || grad_output.cols() != output_dim_) {
    throw ShapeError("upstream gradient shape does not match the last forward output");
  }

  GradientSet grads = zero_gradients();
  Matrix g = grad_output;
  for (std::size_t layer = specs_.size(); layer-- > 0;) {
    const LayerSlot& slot = slots_[layer];
    const Matrix& input = inputs_[layer];
    switch (specs_[layer].kind) {
      case LayerKind::dense:
        grads.tensors[slot.param].noalias() = input.transpose() * g;
        grads.tensors[slot.param + 1] = g.colwise().sum();
        g = g * params_[slot.param].transpose();
        break;
      case LayerKind::relu:
        g = (input.array() > 0.0).select(g, 0.0);
        break;
      case LayerKind::batchnorm: {
        const BatchNormCache& cache = bn_cache_[slot.bn];
        grads.tensors[slot.param] = (g.array() * cache.normalized.array()).colwise().sum();
        grads.tensors[slot.param + 1] = g.colwise().sum();
        const Matrix dnorm = g.array().rowwise() * params_[slot.param].row(0).array();
        const RowVector sum_d = dnorm.colwise().sum();
        const RowVector sum_dx = (dnorm.array() * cache.normalized.array()).colwise().sum();
        const double nn = static_cast<double>(n);
        Matrix dx = (nn * dnorm).rowwise() - sum_d;
        dx -= (cache.normalized.array().rowwise() * sum_dx.array()).matrix();
        g = dx.array().rowwise() * (cache.inv_std.array() / nn);
        break;
      }
    }
  }
  has_cache_ = false;
  if (grad_input) *grad_input = std::move(g);
  return grads;
}

std::pair<double, GradientSet> Mlp::backward_loss(const Matrix& x, std::span<const int> labels) {
  if (mode_ != Mode::train) throw ContractError("backward requires train mode");
  const Matrix logits = forward(x);
  LossAndGradient lg = softmax_cross_entropy(logits, labels);
  return {lg.loss, backward(lg.grad)};
}

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw ShapeError("label count does not match logit rows");
  }
  if (logits.rows() == 0) throw ShapeError("empty logit batch");
  for (int label : labels) {
    if (label < 0 || label >= logits.cols()) {
      throw InputError("label " + std::to_string(label) + " outside [0, " +
                       std::to_string(logits.cols()) + ")");
    }
  }
  if (logits.hasNaN()) throw NumericError("NaN logit");
}

}  // namespace

LossAndGradient softmax_cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  const Eigen::Index n = logits.rows();
  // The 1e-16 offset is part of the reference loss; it cancels inside softmax.
  const Matrix shifted = logits.array() + 1e-16;
  LossAndGradient out;
  out.grad.resize(n, logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_max = shifted.row(i).maxCoeff();
    const Eigen::ArrayXd e = (shifted.row(i).array() - row_max).exp().transpose();
    const double sum = e.sum();
    const double log_sum = row_max + std::log(sum);
    total += log_sum - shifted(i, labels[i]);
    out.grad.row(i) = (e / sum).transpose();
    out.grad(i, labels[i]) -= 1.0;
  }
  out.loss = total / static_cast<double>(n);
  out.grad /= static_cast<double>(n);
  if (!std::isfinite(out.loss)) throw NumericError("non-finite cross-entropy");
  return out;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  return softmax_cross_entropy(logits, labels).loss;
}

std::vector<int> predict_classes(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace causirl
