#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>

#include "causirl/diffnet.hpp"
#include "causirl/rng.hpp"

namespace causirl::test {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Central differences of `f` with respect to every entry of `x`. The default
// step keeps truncation error far below 1e-4 even for the gamma = 1000 kernel.
inline Matrix numeric_gradient(const std::function<double()>& f, Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = f();
    x.data()[i] = saved - h;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a|| + ||b||, floor). The floor keeps all-zero gradients
// (dead ReLU units, a bias feeding batchnorm) from turning rounding noise
// into a large ratio.
inline double relative_error(const Matrix& analytic, const Matrix& numeric, double floor = 1e-4) {
  const double diff = (analytic - numeric).norm();
  return diff / std::max(analytic.norm() + numeric.norm(), floor);
}

}  // namespace causirl::test
