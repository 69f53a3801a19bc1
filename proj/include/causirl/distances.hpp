#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "causirl/diffnet.hpp"

namespace causirl {

/// Multi-bandwidth Gaussian MMD. The kernel is the SUM over `gammas` of
/// exp(-gamma * ||a - b||^2).
struct MmdDistance {
  std::vector<double> gammas{0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
};

/// Mean/covariance alignment.
struct CoralDistance {};

using DistanceKind = std::variant<MmdDistance, CoralDistance>;

/// Throws ConfigError for an empty or non-positive gamma list.
void validate(const DistanceKind& kind);
std::string distance_name(const DistanceKind& kind);

/// A distance value with its gradients with respect to both inputs.
struct DistanceResult {
  double value = 0.0;
  Matrix grad_x;
  Matrix grad_y;
};

/// Callable distance, so penalties can run against stubs and counters.
using DistanceFn = std::function<DistanceResult(const Matrix&, const Matrix&)>;

/// ||a_i - b_j||^2, floored at 1e-30.
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);

/// Biased V-statistic: mean(Kxx) + mean(Kyy) - 2 mean(Kxy), diagonals included.
DistanceResult mmd_gaussian(const Matrix& x, const Matrix& y, const std::vector<double>& gammas);

/// mean_k (mu_x - mu_y)_k^2 + mean_kl (C_x - C_y)_kl^2 with sample covariances
/// (1 / (n - 1)). Both inputs need at least two rows.
DistanceResult coral(const Matrix& x, const Matrix& y);

DistanceResult evaluate_distance(const DistanceKind& kind, const Matrix& x, const Matrix& y);
DistanceFn make_distance(DistanceKind kind);

}  // namespace causirl
