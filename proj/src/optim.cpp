#include "causirl/optim.hpp"

#include <cmath>
#include <numbers>

#include "causirl/error.hpp"

namespace causirl {

void OptimConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("weight_decay must be non-negative");
  }
}

AdamState AdamState::for_params(const std::vector<Matrix>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.push_back(Matrix::Zero(p.rows(), p.cols()));
    state.v.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  return state;
}

void adam_step(std::vector<Matrix>& params, const GradientSet& grads, AdamState& state,
               const OptimConfig& cfg, double lr) {
  if (grads.tensors.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("optimizer tensors are not congruent with the parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads.tensors[i].rows() != params[i].rows() || grads.tensors[i].cols() != params[i].cols()) {
      throw ShapeError("gradient tensor shape does not match its parameter");
    }
  }
  if (!grads.all_finite()) throw NumericError("non-finite gradient passed to adam_step");

  const std::int64_t t = state.t + 1;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const double step = lr / bias1;
  const double sqrt_bias2 = std::sqrt(bias2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix g = grads.tensors[i];
    if (cfg.weight_decay != 0.0) g += cfg.weight_decay * params[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd denom = state.v[i].array().sqrt() / sqrt_bias2 + cfg.eps;
    params[i].array() -= step * state.m[i].array() / denom;
  }
  state.t = t;
}

ScheduledRate cosine_lr(double lr0, std::int64_t t, std::int64_t total) {
  if (total < 1) throw ConfigError("cosine schedule needs at least one step");
  if (t < 0) throw ConfigError("negative schedule step");
  if (t >= total) return {0.0, t > total};
  const double phase = std::numbers::pi * static_cast<double>(t) / static_cast<double>(total);
  return {std::max(0.0, lr0 * (1.0 + std::cos(phase)) / 2.0), false};
}

ScheduledRate scheduled_lr(const OptimConfig& cfg, std::int64_t epoch, std::int64_t total_epochs) {
  if (cfg.schedule == Schedule::constant) return {cfg.lr, false};
  return cosine_lr(cfg.lr, epoch, total_epochs);
}

}  // namespace causirl
