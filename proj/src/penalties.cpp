#include "causirl/penalties.hpp"

#include <cmath>

#include "causirl/error.hpp"

namespace causirl {

namespace {

void check_batches(std::span<const Matrix> batches) {
  if (batches.empty()) throw InputError("no domain batches given");
  const Eigen::Index width = batches.front().cols();
  for (const auto& b : batches) {
    if (b.cols() != width) throw ShapeError("domain batches disagree on feature dimension");
  }
}

std::vector<Matrix> zero_like(std::span<const Matrix> latents) {
  std::vector<Matrix> out;
  out.reserve(latents.size());
  for (const auto& z : latents) out.push_back(Matrix::Zero(z.rows(), z.cols()));
  return out;
}

// Applies the reference guard: non-finite values (or gradients) become 0.
void guard_nonfinite(PenaltyResult& result) {
  bool finite = std::isfinite(result.value);
  for (const auto& g : result.grads) finite = finite && g.allFinite();
  if (finite) return;
  result.value = 0.0;
  for (auto& g : result.grads) g.setZero();
  ++result.nonfinite;
}

}  // namespace

std::string penalty_name(PenaltyVariant variant) {
  return variant == PenaltyVariant::causirl_mixture ? "causirl" : "pairwise";
}

void PenaltyKind::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw ConfigError("lambda must be finite and >= 0");
  causirl::validate(distance);
}

SplitPlan draw_split_plan(std::span<const std::size_t> sizes, Rng& rng) {
  SplitPlan plan;
  plan.cuts.reserve(sizes.size());
  for (std::size_t n : sizes) plan.cuts.push_back(static_cast<std::size_t>(rng.uniform_int(n + 1)));
  return plan;
}

MixtureSplit mixture_split(std::span<const Matrix> batches, const SplitPlan& plan) {
  check_batches(batches);
  if (plan.cuts.size() != batches.size()) throw InputError("split plan size differs from batch count");
  Eigen::Index first_rows = 0;
  Eigen::Index total_rows = 0;
  for (std::size_t i = 0; i < batches.size(); ++i) {
    if (batches[i].rows() < 1) throw InputError("domain batch " + std::to_string(i) + " is empty");
    if (plan.cuts[i] > static_cast<std::size_t>(batches[i].rows())) {
      throw InputError("cut point exceeds batch size for domain " + std::to_string(i));
    }
    first_rows += static_cast<Eigen::Index>(plan.cuts[i]);
    total_rows += batches[i].rows();
  }
  const Eigen::Index width = batches.front().cols();
  MixtureSplit out{Matrix(first_rows, width), Matrix(total_rows - first_rows, width), plan};
  Eigen::Index f = 0;
  Eigen::Index s = 0;
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto cut = static_cast<Eigen::Index>(plan.cuts[i]);
    const Eigen::Index rest = batches[i].rows() - cut;
    out.first.middleRows(f, cut) = batches[i].topRows(cut);
    out.second.middleRows(s, rest) = batches[i].bottomRows(rest);
    f += cut;
    s += rest;
  }
  return out;
}

MixtureSplit mixture_split(std::span<const Matrix> batches, Rng& rng) {
  check_batches(batches);
  std::vector<std::size_t> sizes;
  for (const auto& b : batches) sizes.push_back(static_cast<std::size_t>(b.rows()));
  return mixture_split(batches, draw_split_plan(sizes, rng));
}

PenaltyResult causirl_penalty(std::span<const Matrix> latents, const DistanceFn& distance,
                              const SplitPlan& plan) {
  const MixtureSplit split = mixture_split(latents, plan);
  PenaltyResult result;
  result.grads = zero_like(latents);
  if (split.first.rows() <= 1 || split.second.rows() <= 1) {
    result.skipped = 1;
    return result;
  }

  const DistanceResult d = distance(split.first, split.second);
  ++result.distance_evals;
  result.value = d.value;
  Eigen::Index f = 0;
  Eigen::Index s = 0;
  for (std::size_t i = 0; i < latents.size(); ++i) {
    const auto cut = static_cast<Eigen::Index>(plan.cuts[i]);
    const Eigen::Index rest = latents[i].rows() - cut;
    result.grads[i].topRows(cut) = d.grad_x.middleRows(f, cut);
    result.grads[i].bottomRows(rest) = d.grad_y.middleRows(s, rest);
    f += cut;
    s += rest;
  }
  guard_nonfinite(result);
  return result;
}

PenaltyResult causirl_penalty(std::span<const Matrix> latents, const DistanceFn& distance,
                              Rng& rng) {
  check_batches(latents);
  std::vector<std::size_t> sizes;
  for (const auto& z : latents) sizes.push_back(static_cast<std::size_t>(z.rows()));
  return causirl_penalty(latents, distance, draw_split_plan(sizes, rng));
}

PenaltyResult pairwise_penalty(std::span<const Matrix> latents, const DistanceFn& distance) {
  check_batches(latents);
  PenaltyResult result;
  result.grads = zero_like(latents);
  const std::size_t d = latents.size();
  if (d < 2) return result;
  const double norm = 2.0 / static_cast<double>(d * (d - 1));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const DistanceResult pair = distance(latents[i], latents[j]);
      ++result.distance_evals;
      result.value += norm * pair.value;
      result.grads[i] += norm * pair.grad_x;
      result.grads[j] += norm * pair.grad_y;
    }
  }
  guard_nonfinite(result);
  return result;
}

PenaltyResult compute_penalty(std::span<const Matrix> latents, const PenaltyKind& kind, Rng& rng) {
  const DistanceFn distance = make_distance(kind.distance);
  if (kind.variant == PenaltyVariant::causirl_mixture) return causirl_penalty(latents, distance, rng);
  return pairwise_penalty(latents, distance);
}

double training_loss(std::span<const Matrix> logits, std::span<const std::vector<int>> labels,
                     double penalty_value, double lambda) {
  if (logits.empty()) throw InputError("training loss needs at least one domain");
  if (logits.size() != labels.size()) throw InputError("logit and label domain counts differ");
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += cross_entropy(logits[i], labels[i]);
  return total / static_cast<double>(logits.size()) + lambda * penalty_value;
}

}  // namespace causirl
