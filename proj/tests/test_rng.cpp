#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "causirl/rng.hpp"

using causirl::Rng;

TEST_CASE("rng: same seed, same stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("rng: substreams differ by tag and index") {
  Rng a = Rng::substream(7, "batches");
  Rng b = Rng::substream(7, "mixture-split");
  Rng c = Rng::substream(7, "batches", 1);
  Rng a2 = Rng::substream(7, "batches");
  const auto x = a.next();
  CHECK(x != b.next());
  CHECK(x != c.next());
  CHECK(x == a2.next());
}

TEST_CASE("rng: uniform in [0, 1) with mean 1/2") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("rng: uniform_int covers [0, bound) evenly") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.uniform_int(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(c == doctest::Approx(n / 7.0).epsilon(0.05));
}

TEST_CASE("rng: normal has mean 0 and variance 1") {
  Rng rng(5);
  const int n = 400000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("rng: permutation is a permutation") {
  Rng rng(9);
  auto p = rng.permutation(100);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(100);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
  CHECK(p != iota);
}
