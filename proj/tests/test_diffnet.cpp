#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "causirl/diffnet.hpp"
#include "causirl/error.hpp"
#include "support.hpp"

using namespace causirl;
using causirl::test::numeric_gradient;
using causirl::test::random_matrix;
using causirl::test::relative_error;

namespace {

// sum(R .* net(x)) as a scalar probe for arbitrary output gradients.
double probe(Mlp& net, const Matrix& x, const Matrix& r) { return net.forward(x).cwiseProduct(r).sum(); }

void check_mlp_gradients(const std::vector<LayerSpec>& specs, std::uint64_t seed, Eigen::Index batch,
                         double h = 1e-5, std::function<bool(const Mlp&, const Matrix&)> accept = {}) {
  Mlp net(specs, seed);
  Rng rng(seed ^ 0xabcdefULL);
  // Zero-initialised biases can put a ReLU input exactly on its kink; jitter
  // every parameter so the check runs at a differentiable point.
  for (auto& p : net.params()) p += random_matrix(p.rows(), p.cols(), rng, 0.1);
  Matrix x = random_matrix(batch, net.input_dim(), rng);
  while (accept && !accept(net, x)) x = random_matrix(batch, net.input_dim(), rng);
  const Matrix r = random_matrix(batch, net.output_dim(), rng);

  net.forward(x);
  Matrix grad_x;
  const GradientSet grads = net.backward(r, &grad_x);
  REQUIRE(grads.tensors.size() == net.params().size());

  for (std::size_t p = 0; p < net.params().size(); ++p) {
    Matrix& param = net.params()[p];
    const Matrix numeric = numeric_gradient([&] { return probe(net, x, r); }, param, h);
    INFO("seed " << seed << " tensor " << p);
    CHECK(relative_error(grads.tensors[p], numeric) < 1e-4);
  }
  const Matrix numeric_x = numeric_gradient([&] { return probe(net, x, r); }, x, h);
  INFO("seed " << seed << " input");
  CHECK(relative_error(grad_x, numeric_x) < 1e-4);
}

}  // namespace

TEST_CASE("diffnet: init is deterministic per seed") {
  Mlp a({LayerSpec::dense(3, 5)}, 7);
  Mlp b({LayerSpec::dense(3, 5)}, 7);
  REQUIRE(a.params().size() == b.params().size());
  for (std::size_t i = 0; i < a.params().size(); ++i) CHECK(a.params()[i] == b.params()[i]);
  Mlp c({LayerSpec::dense(3, 5)}, 8);
  CHECK(a.params()[0] != c.params()[0]);
}

TEST_CASE("diffnet: init draws weights in +-1/sqrt(fan_in) and zero biases") {
  Mlp net({LayerSpec::dense(16, 8), LayerSpec::relu(), LayerSpec::dense(8, 2)}, 3);
  const double bound0 = 1.0 / std::sqrt(16.0);
  CHECK(net.params()[0].rows() == 16);
  CHECK(net.params()[0].cols() == 8);
  CHECK(net.params()[0].cwiseAbs().maxCoeff() <= bound0);
  CHECK(net.params()[1].isZero());
  CHECK(net.params()[2].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
  CHECK(net.params()[3].isZero());
}

TEST_CASE("diffnet: chaining mismatch is a config error") {
  CHECK_THROWS_AS(Mlp({LayerSpec::dense(3, 5), LayerSpec::relu(), LayerSpec::dense(4, 2)}, 0), ConfigError);
  CHECK_THROWS_AS(Mlp({LayerSpec::dense(3, 5), LayerSpec::batchnorm(4)}, 0), ConfigError);
  CHECK_THROWS_AS(Mlp({LayerSpec::dense(0, 5)}, 0), ConfigError);
}

TEST_CASE("diffnet: batchnorm state starts at mean 0, var 1, scale 1, shift 0") {
  Mlp net({LayerSpec::dense(2, 10), LayerSpec::batchnorm(10), LayerSpec::relu(), LayerSpec::dense(10, 5)}, 11);
  REQUIRE(net.batchnorm_stats().size() == 1);
  CHECK(net.batchnorm_stats()[0].running_mean.isZero());
  CHECK(net.batchnorm_stats()[0].running_var.isOnes());
  CHECK(net.params()[2].isOnes());
  CHECK(net.params()[3].isZero());
}

TEST_CASE("diffnet: zero weights propagate zeros") {
  Mlp net({LayerSpec::dense(3, 4), LayerSpec::relu(), LayerSpec::dense(4, 2), LayerSpec::relu()}, 1);
  for (auto& p : net.params()) p.setZero();
  Rng rng(2);
  CHECK(net.forward(random_matrix(6, 3, rng)).isZero());
}

TEST_CASE("diffnet: train-mode batchnorm normalizes each feature") {
  Mlp net({LayerSpec::batchnorm(4)}, 0);
  Rng rng(4);
  Matrix x = random_matrix(64, 4, rng, 3.0);
  for (Eigen::Index j = 0; j < 4; ++j) x.col(j).array() += 10.0 * static_cast<double>(j);
  const Matrix out = net.forward(x);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double mean = out.col(j).mean();
    const double var = (out.col(j).array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-3);
  }
}

TEST_CASE("diffnet: running statistics use momentum 0.1 and the unbiased variance") {
  Mlp net({LayerSpec::batchnorm(2)}, 0);
  Matrix x(4, 2);
  x << 1, 0, 2, 0, 3, 4, 6, 8;
  net.forward(x);
  // column 0: mean 3, unbiased var ((4+1+0+9)/3) = 14/3; column 1: mean 3, var (9+9+1+25)/3 = 44/3
  const auto& s = net.batchnorm_stats()[0];
  CHECK(s.running_mean(0) == doctest::Approx(0.3));
  CHECK(s.running_mean(1) == doctest::Approx(0.3));
  CHECK(s.running_var(0) == doctest::Approx(0.9 + 0.1 * 14.0 / 3.0));
  CHECK(s.running_var(1) == doctest::Approx(0.9 + 0.1 * 44.0 / 3.0));
}

TEST_CASE("diffnet: eval mode uses running statistics and repeats exactly") {
  Mlp net({LayerSpec::dense(3, 6), LayerSpec::batchnorm(6), LayerSpec::relu(), LayerSpec::dense(6, 2)}, 5);
  Rng rng(6);
  for (int i = 0; i < 5; ++i) net.forward(random_matrix(16, 3, rng));
  net.set_mode(Mode::eval);
  const Matrix x = random_matrix(9, 3, rng);
  const Matrix a = net.forward(x);
  const Matrix b = net.forward(x);
  CHECK(a == b);
  CHECK(net.infer(x) == a);
  // a single row is fine in eval mode and matches the batched output
  CHECK((net.forward(x.topRows(1)) - a.topRows(1)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("diffnet: forward preconditions") {
  Mlp net({LayerSpec::dense(2, 3), LayerSpec::batchnorm(3)}, 0);
  Rng rng(0);
  CHECK_THROWS_AS(net.forward(random_matrix(1, 2, rng)), DegenerateBatchError);
  CHECK_THROWS_AS(net.forward(random_matrix(4, 3, rng)), ShapeError);
}

TEST_CASE("diffnet: backward contract") {
  Mlp net({LayerSpec::dense(2, 3), LayerSpec::relu(), LayerSpec::dense(3, 2)}, 0);
  Rng rng(1);
  CHECK_THROWS_AS(net.backward(Matrix::Zero(4, 2)), ContractError);  // no cached forward
  const Matrix x = random_matrix(4, 2, rng);
  net.forward(x);
  const GradientSet zero = net.backward(Matrix::Zero(4, 2));
  for (const auto& g : zero.tensors) CHECK(g.isZero());
  net.set_mode(Mode::eval);
  CHECK_THROWS_AS(net.backward(Matrix::Zero(4, 2)), ContractError);
}

TEST_CASE("diffnet: cross-entropy values") {
  const std::vector<int> zero{0};
  const std::vector<int> one{1};
  Matrix uniform(1, 2);
  uniform << 0, 0;
  CHECK(cross_entropy(uniform, zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy(uniform, one) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Matrix confident(1, 2);
  confident << 10, 0;
  // -log(1 / (1 + e^-10)) = log1p(e^-10)
  const double oracle = std::log1p(std::exp(-10.0));
  CHECK(cross_entropy(confident, zero) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(oracle == doctest::Approx(4.5399e-5).epsilon(1e-4));

  Matrix two(2, 2);
  two << 0, 0, 0, 0;
  const std::vector<int> labels{0, 1};
  CHECK(cross_entropy(two, labels) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("diffnet: cross-entropy errors") {
  Matrix logits(1, 2);
  logits << 1, 2;
  const std::vector<int> bad{2};
  const std::vector<int> negative{-1};
  CHECK_THROWS_AS(cross_entropy(logits, bad), InputError);
  CHECK_THROWS_AS(cross_entropy(logits, negative), InputError);
  logits(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const std::vector<int> ok{0};
  CHECK_THROWS_AS(cross_entropy(logits, ok), NumericError);
}

TEST_CASE("diffnet: cross-entropy is non-negative and ln C only when uniform") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix logits = random_matrix(5, 3, rng, 4.0);
    std::vector<int> labels(5);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_int(3));
    CHECK(cross_entropy(logits, labels) >= 0.0);
  }
  Matrix flat = Matrix::Constant(3, 4, 2.5);
  const std::vector<int> labels{0, 1, 3};
  CHECK(cross_entropy(flat, labels) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("diffnet: cross-entropy gradient matches finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Matrix logits = random_matrix(6, 4, rng, 2.0);
    std::vector<int> labels(6);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_int(4));
    const LossAndGradient lg = softmax_cross_entropy(logits, labels);
    const Matrix numeric = numeric_gradient([&] { return cross_entropy(logits, labels); }, logits);
    CHECK(relative_error(lg.grad, numeric) < 1e-4);
  }
}

TEST_CASE("diffnet: backward_loss agrees with cross_entropy(forward)") {
  Mlp net({LayerSpec::dense(2, 10), LayerSpec::relu(), LayerSpec::dense(10, 5), LayerSpec::relu(),
           LayerSpec::dense(5, 3)},
          21);
  Rng rng(22);
  const Matrix x = random_matrix(8, 2, rng);
  const std::vector<int> labels{0, 1, 2, 0, 1, 2, 0, 1};
  const auto [loss, grads] = net.backward_loss(x, labels);
  CHECK(std::abs(loss - cross_entropy(net.forward(x), labels)) < 1e-12);
  CHECK(grads.all_finite());
}

TEST_CASE("diffnet: 2-10-5 network gradients match finite differences (step 1e-3, batch 8)") {
  const std::vector<LayerSpec> specs{LayerSpec::dense(2, 10), LayerSpec::relu(), LayerSpec::dense(10, 5)};
  // A 1e-3 step is only a valid oracle away from the ReLU kink, so inputs
  // whose hidden pre-activations come within 0.05 of zero are redrawn.
  auto clear_of_kink = [](const Mlp& net, const Matrix& x) {
    const Matrix pre = (x * net.params()[0]).rowwise() + net.params()[1].row(0);
    return pre.cwiseAbs().minCoeff() > 0.05;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) check_mlp_gradients(specs, seed, 8, 1e-3, clear_of_kink);
}

TEST_CASE("diffnet: every layer kind and up to 3 hidden layers match finite differences") {
  const std::vector<std::vector<LayerSpec>> nets{
      {LayerSpec::dense(3, 4)},
      {LayerSpec::batchnorm(3)},
      {LayerSpec::dense(3, 10), LayerSpec::batchnorm(10), LayerSpec::relu(), LayerSpec::dense(10, 5)},
      {LayerSpec::dense(3, 6), LayerSpec::batchnorm(6), LayerSpec::relu(), LayerSpec::dense(6, 5),
       LayerSpec::batchnorm(5), LayerSpec::relu(), LayerSpec::dense(5, 2)},
      {LayerSpec::dense(3, 7), LayerSpec::relu(), LayerSpec::dense(7, 6), LayerSpec::batchnorm(6),
       LayerSpec::relu(), LayerSpec::dense(6, 4), LayerSpec::relu(), LayerSpec::dense(4, 2)},
  };
  for (const auto& specs : nets) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) check_mlp_gradients(specs, seed, 12);
  }
}

TEST_CASE("diffnet: same inputs give bit-identical activations and gradients") {
  const std::vector<LayerSpec> specs{LayerSpec::dense(3, 8), LayerSpec::batchnorm(8), LayerSpec::relu(),
                                     LayerSpec::dense(8, 2)};
  Mlp a(specs, 9);
  Mlp b(specs, 9);
  Rng rng(10);
  const Matrix x = random_matrix(10, 3, rng);
  const std::vector<int> labels{0, 1, 0, 1, 1, 0, 0, 1, 1, 1};
  const auto ra = a.backward_loss(x, labels);
  const auto rb = b.backward_loss(x, labels);
  CHECK(ra.first == rb.first);
  for (std::size_t i = 0; i < ra.second.tensors.size(); ++i) CHECK(ra.second.tensors[i] == rb.second.tensors[i]);
}
