#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causirl/distances.hpp"
#include "causirl/rng.hpp"

namespace causirl {

enum class PenaltyVariant { causirl_mixture, pairwise_baseline };

std::string penalty_name(PenaltyVariant variant);

struct PenaltyKind {
  PenaltyVariant variant = PenaltyVariant::causirl_mixture;
  DistanceKind distance = MmdDistance{};
  double lambda = 1.0;

  /// lambda finite and >= 0, distance parameters valid.
  void validate() const;
};

/// Per-domain cut points: domain i contributes rows [0, cuts[i]) to the first
/// mixture and rows [cuts[i], n_i) to the second.
struct SplitPlan {
  std::vector<std::size_t> cuts;
};

struct MixtureSplit {
  Matrix first;
  Matrix second;
  SplitPlan plan;
};

/// Cut points drawn independently and uniformly on {0, ..., n_i}.
SplitPlan draw_split_plan(std::span<const std::size_t> sizes, Rng& rng);

/// Concatenates the head slices of every batch into `first` and the tail
/// slices into `second`, keeping row order within each domain.
MixtureSplit mixture_split(std::span<const Matrix> batches, const SplitPlan& plan);
MixtureSplit mixture_split(std::span<const Matrix> batches, Rng& rng);

struct PenaltyResult {
  double value = 0.0;
  std::vector<Matrix> grads;       // d value / d latents[i], same shapes
  std::size_t distance_evals = 0;  // calls made to the distance
  std::size_t nonfinite = 0;       // distance values replaced by 0
  std::size_t skipped = 0;         // 1 when the mixture guard returned 0 unevaluated
};

/// One distance between two random cross-domain mixtures. Returns exactly 0
/// without evaluating the distance when either mixture has one row or fewer.
PenaltyResult causirl_penalty(std::span<const Matrix> latents, const DistanceFn& distance,
                              const SplitPlan& plan);
PenaltyResult causirl_penalty(std::span<const Matrix> latents, const DistanceFn& distance,
                              Rng& rng);

/// Mean distance over all unordered domain pairs; 0 for a single domain.
PenaltyResult pairwise_penalty(std::span<const Matrix> latents, const DistanceFn& distance);

/// Dispatches on `kind.variant`. The returned value is NOT scaled by lambda.
PenaltyResult compute_penalty(std::span<const Matrix> latents, const PenaltyKind& kind, Rng& rng);

/// (1/d) sum_i CE(logits_i, labels_i) + lambda * penalty_value.
double training_loss(std::span<const Matrix> logits, std::span<const std::vector<int>> labels,
                     double penalty_value, double lambda);

}  // namespace causirl
