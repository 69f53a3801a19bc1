#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "causirl/distances.hpp"
#include "causirl/error.hpp"
#include "support.hpp"

using namespace causirl;
using causirl::test::numeric_gradient;
using causirl::test::random_matrix;
using causirl::test::relative_error;

namespace {

const std::vector<double> kGammas = MmdDistance{}.gammas;

// Direct triple loop over the biased V-statistic, independent of the
// library's vectorised kernel sums.
double mmd_oracle(const Matrix& x, const Matrix& y, const std::vector<double>& gammas) {
  auto k = [&](const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    double d = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) d += (a(i, c) - b(j, c)) * (a(i, c) - b(j, c));
    d = std::max(d, 1e-30);
    double s = 0.0;
    for (double g : gammas) s += std::exp(-g * d);
    return s;
  };
  auto mean_k = [&](const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.rows(); ++j) s += k(a, i, b, j);
    }
    return s / static_cast<double>(a.rows() * b.rows());
  };
  return mean_k(x, x) + mean_k(y, y) - 2.0 * mean_k(x, y);
}

Matrix cov_oracle(const Matrix& x) {
  const RowVector mu = x.colwise().mean();
  const Matrix c = x.rowwise() - mu;
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

double coral_oracle(const Matrix& x, const Matrix& y) {
  const RowVector dm = x.colwise().mean() - y.colwise().mean();
  const Matrix dc = cov_oracle(x) - cov_oracle(y);
  return dm.squaredNorm() / static_cast<double>(x.cols()) + dc.squaredNorm() / static_cast<double>(dc.size());
}

}  // namespace

TEST_CASE("distances: pairwise squared distances") {
  Matrix zero(1, 1);
  zero << 0;
  Matrix two(1, 1);
  two << 2;
  CHECK(pairwise_sq_dists(zero, zero)(0, 0) == 1e-30);
  CHECK(pairwise_sq_dists(zero, two)(0, 0) == 4.0);
  Matrix units(2, 2);
  units << 1, 0, 0, 1;
  const Matrix d = pairwise_sq_dists(units, Matrix::Zero(1, 2));
  CHECK(d.rows() == 2);
  CHECK(d.cols() == 1);
  CHECK(d(0, 0) == 1.0);
  CHECK(d(1, 0) == 1.0);
  CHECK_THROWS_AS(pairwise_sq_dists(units, Matrix::Zero(1, 3)), ShapeError);
}

TEST_CASE("distances: mmd hand values") {
  Matrix x(1, 1);
  x << 0;
  Matrix y(1, 1);
  y << 1;
  CHECK(mmd_gaussian(x, y, {1.0}).value == doctest::Approx(2.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(mmd_gaussian(x, y, {1.0}).value == doctest::Approx(1.26424).epsilon(1e-5));
  Rng rng(1);
  const Matrix z = random_matrix(7, 3, rng);
  CHECK(mmd_gaussian(z, z, kGammas).value == 0.0);
}

TEST_CASE("distances: mmd matches a direct loop oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix x = random_matrix(6, 3, rng, 0.3);
    const Matrix y = random_matrix(9, 3, rng, 0.3);
    CHECK(mmd_gaussian(x, y, kGammas).value == doctest::Approx(mmd_oracle(x, y, kGammas)).epsilon(1e-12));
  }
}

TEST_CASE("distances: coral hand value and oracle") {
  Matrix x(2, 1);
  x << 0, 2;
  Matrix y(2, 1);
  y << 1, 3;
  CHECK(coral(x, y).value == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Matrix a = random_matrix(8, 4, rng);
    const Matrix b = random_matrix(5, 4, rng, 2.0);
    CHECK(coral(a, b).value == doctest::Approx(coral_oracle(a, b)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(coral(Matrix::Zero(1, 2), Matrix::Zero(3, 2)), DegenerateBatchError);
  CHECK_THROWS_AS(coral(Matrix::Zero(3, 2), Matrix::Zero(1, 2)), DegenerateBatchError);
}

TEST_CASE("distances: symmetry, non-negativity, zero on identical, translation invariance") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    const Matrix x = random_matrix(10, 3, rng);
    const Matrix y = random_matrix(12, 3, rng, 1.5);
    RowVector shift = random_matrix(1, 3, rng, 5.0);
    const Matrix xs = x.rowwise() + shift;
    const Matrix ys = y.rowwise() + shift;

    const double m = mmd_gaussian(x, y, kGammas).value;
    CHECK(std::abs(m - mmd_gaussian(y, x, kGammas).value) < 1e-12);
    CHECK(m >= -1e-9);
    CHECK(mmd_gaussian(x, x, kGammas).value == 0.0);
    CHECK(std::abs(m - mmd_gaussian(xs, ys, kGammas).value) < 1e-9);

    const double c = coral(x, y).value;
    CHECK(std::abs(c - coral(y, x).value) < 1e-12);
    CHECK(c >= 0.0);
    CHECK(coral(x, x).value == 0.0);
    CHECK(std::abs(c - coral(xs, ys).value) < 1e-9);
  }
}

TEST_CASE("distances: gradients match finite differences on 8x3 batches") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 50);
    Matrix x = random_matrix(8, 3, rng, 0.5);
    Matrix y = random_matrix(8, 3, rng, 0.5);
    y.array() += 0.3;

    const DistanceResult m = mmd_gaussian(x, y, kGammas);
    INFO("seed " << seed);
    CHECK(relative_error(m.grad_x, numeric_gradient([&] { return mmd_gaussian(x, y, kGammas).value; }, x)) <
          1e-4);
    CHECK(relative_error(m.grad_y, numeric_gradient([&] { return mmd_gaussian(x, y, kGammas).value; }, y)) <
          1e-4);

    const DistanceResult c = coral(x, y);
    CHECK(relative_error(c.grad_x, numeric_gradient([&] { return coral(x, y).value; }, x)) < 1e-4);
    CHECK(relative_error(c.grad_y, numeric_gradient([&] { return coral(x, y).value; }, y)) < 1e-4);
  }
}

TEST_CASE("distances: mmd separates shifted Gaussians beyond the permutation null") {
  Rng rng(2024);
  const Eigen::Index n = 256;
  const Matrix x = random_matrix(n, 2, rng);
  Matrix y = random_matrix(n, 2, rng);
  y.array() += 2.0;
  const double observed = mmd_gaussian(x, y, kGammas).value;

  Matrix pooled(2 * n, 2);
  pooled << x, y;
  std::vector<double> null;
  for (int s = 0; s < 200; ++s) {
    const auto perm = rng.permutation(static_cast<std::size_t>(2 * n));
    Matrix a(n, 2);
    Matrix b(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      a.row(i) = pooled.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
      b.row(i) = pooled.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(n + i)]));
    }
    null.push_back(mmd_gaussian(a, b, kGammas).value);
  }
  std::sort(null.begin(), null.end());
  CHECK(observed > null[197]);  // 99th percentile of 200
}

TEST_CASE("distances: kind validation and dispatch") {
  CHECK_NOTHROW(validate(DistanceKind{MmdDistance{}}));
  CHECK_THROWS_AS(validate(DistanceKind{MmdDistance{{}}}), ConfigError);
  CHECK_THROWS_AS(validate(DistanceKind{MmdDistance{{1.0, -0.5}}}), ConfigError);
  CHECK(distance_name(MmdDistance{}) == "mmd");
  CHECK(distance_name(CoralDistance{}) == "coral");
  Rng rng(3);
  const Matrix x = random_matrix(5, 2, rng);
  const Matrix y = random_matrix(5, 2, rng);
  CHECK(make_distance(CoralDistance{})(x, y).value == coral(x, y).value);
  CHECK(evaluate_distance(MmdDistance{{0.5}}, x, y).value == mmd_gaussian(x, y, {0.5}).value);
}
