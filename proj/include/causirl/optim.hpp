#pragma once

#include <cstdint>
#include <vector>

#include "causirl/diffnet.hpp"

namespace causirl {

enum class Schedule { constant, cosine };

struct OptimConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  Schedule schedule = Schedule::constant;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::int64_t t = 0;

  static AdamState for_params(const std::vector<Matrix>& params);
};

/// One Adam step with bias correction at learning rate `lr`. Weight decay is
/// an L2 term folded into the gradient (g + wd * theta) before the moment
/// updates. Non-finite gradients raise NumericError and leave both `params`
/// and `state` untouched.
void adam_step(std::vector<Matrix>& params, const GradientSet& grads, AdamState& state,
               const OptimConfig& cfg, double lr);

inline void adam_step(std::vector<Matrix>& params, const GradientSet& grads, AdamState& state,
                      const OptimConfig& cfg) {
  adam_step(params, grads, state, cfg, cfg.lr);
}

struct ScheduledRate {
  double lr = 0.0;
  bool overrun = false;  // t was past the end of the schedule
};

/// lr0 * (1 + cos(pi * t / total)) / 2, annealing to exactly 0 at t = total.
/// Steps past `total` clamp to 0 and set `overrun`.
ScheduledRate cosine_lr(double lr0, std::int64_t t, std::int64_t total);

/// Rate for epoch `epoch` of `total_epochs` under `cfg.schedule`.
ScheduledRate scheduled_lr(const OptimConfig& cfg, std::int64_t epoch, std::int64_t total_epochs);

}  // namespace causirl
