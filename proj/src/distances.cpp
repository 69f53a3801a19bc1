#include "causirl/distances.hpp"

#include <cmath>
#include <sstream>

#include "causirl/error.hpp"

namespace causirl {

namespace {

constexpr double kDistanceFloor = 1e-30;

void check_same_width(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("feature dimensions differ: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()));
  }
  if (a.cols() < 1) throw ShapeError("feature dimension must be at least 1");
  if (a.rows() < 1 || b.rows() < 1) throw ShapeError("distance inputs need at least one row");
}

Matrix raw_sq_dists(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    d.col(j) = (a.rowwise() - b.row(j)).rowwise().squaredNorm();
  }
  return d;
}

struct KernelMean {
  double value = 0.0;
  Matrix grad_a;
  Matrix grad_b;
};

// weight * mean_ij K(a_i, b_j) and its gradients.
KernelMean kernel_mean(const Matrix& a, const Matrix& b, const std::vector<double>& gammas,
                       double weight) {
  const Matrix raw = raw_sq_dists(a, b);
  const double scale = weight / static_cast<double>(a.rows() * b.rows());
  Matrix dk(raw.rows(), raw.cols());  // d value / d D_ij
  double total = 0.0;
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      const bool clamped = raw(i, j) < kDistanceFloor;
      const double dist = clamped ? kDistanceFloor : raw(i, j);
      double k = 0.0;
      double slope = 0.0;
      for (double g : gammas) {
        const double e = std::exp(-g * dist);
        k += e;
        slope -= g * e;
      }
      total += k;
      dk(i, j) = clamped ? 0.0 : scale * slope;
    }
  }
  KernelMean out;
  out.value = scale * total;
  // dD_ij/da_i = 2 (a_i - b_j), dD_ij/db_j = -2 (a_i - b_j)
  out.grad_a = 2.0 * (dk.rowwise().sum().asDiagonal() * a - dk * b);
  out.grad_b = 2.0 * (dk.colwise().sum().transpose().asDiagonal() * b - dk.transpose() * a);
  return out;
}

}  // namespace

void validate(const DistanceKind& kind) {
  if (const auto* mmd = std::get_if<MmdDistance>(&kind)) {
    if (mmd->gammas.empty()) throw ConfigError("MMD needs at least one gamma");
    for (double g : mmd->gammas) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("MMD gammas must be positive");
    }
  }
}

std::string distance_name(const DistanceKind& kind) {
  return std::holds_alternative<MmdDistance>(kind) ? "mmd" : "coral";
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  check_same_width(a, b);
  return raw_sq_dists(a, b).cwiseMax(kDistanceFloor);
}

DistanceResult mmd_gaussian(const Matrix& x, const Matrix& y, const std::vector<double>& gammas) {
  check_same_width(x, y);
  validate(MmdDistance{gammas});
  const KernelMean kxx = kernel_mean(x, x, gammas, 1.0);
  const KernelMean kyy = kernel_mean(y, y, gammas, 1.0);
  const KernelMean kxy = kernel_mean(x, y, gammas, -2.0);
  DistanceResult out;
  out.value = kxx.value + kyy.value + kxy.value;
  out.grad_x = kxx.grad_a + kxx.grad_b + kxy.grad_a;
  out.grad_y = kyy.grad_a + kyy.grad_b + kxy.grad_b;
  return out;
}

DistanceResult coral(const Matrix& x, const Matrix& y) {
  check_same_width(x, y);
  if (x.rows() < 2 || y.rows() < 2) {
    throw DegenerateBatchError("CORAL needs at least two rows per side");
  }
  const double d = static_cast<double>(x.cols());
  const double nx = static_cast<double>(x.rows());
  const double ny = static_cast<double>(y.rows());

  const RowVector mean_x = x.colwise().mean();
  const RowVector mean_y = y.colwise().mean();
  const Matrix cx = x.rowwise() - mean_x;
  const Matrix cy = y.rowwise() - mean_y;
  const Matrix cov_x = cx.transpose() * cx / (nx - 1.0);
  const Matrix cov_y = cy.transpose() * cy / (ny - 1.0);

  const RowVector mean_diff = mean_x - mean_y;
  const Matrix cov_diff = cov_x - cov_y;

  DistanceResult out;
  out.value = mean_diff.squaredNorm() / d + cov_diff.squaredNorm() / (d * d);

  const Matrix g_cov = 2.0 * cov_diff / (d * d);
  const RowVector g_mean = 2.0 * mean_diff / d;
  out.grad_x = (2.0 / (nx - 1.0)) * cx * g_cov;
  out.grad_x.rowwise() += g_mean / nx;
  out.grad_y = (-2.0 / (ny - 1.0)) * cy * g_cov;
  out.grad_y.rowwise() -= g_mean / ny;
  return out;
}

DistanceResult evaluate_distance(const DistanceKind& kind, const Matrix& x, const Matrix& y) {
  if (const auto* mmd = std::get_if<MmdDistance>(&kind)) return mmd_gaussian(x, y, mmd->gammas);
  return coral(x, y);
}

DistanceFn make_distance(DistanceKind kind) {
  validate(kind);
  return [kind = std::move(kind)](const Matrix& x, const Matrix& y) {
    return evaluate_distance(kind, x, y);
  };
}

}  // namespace causirl
