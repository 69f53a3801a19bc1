#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace causirl {

/// One draw of the synthetic model: label Y, domain index D and the three
/// observed generative factors G1 <- Y, G2 <- Y and D, G3 <- D.
struct ScmSample {
  int y = 0;
  int d = 0;
  std::array<double, 3> g{};

  friend bool operator==(const ScmSample&, const ScmSample&) = default;
};

struct ScmDataset {
  std::vector<ScmSample> train;
  std::vector<ScmSample> test;
  int k = 2;
};

/// Structural assignments with explicit noise:
///   G1 = Y + n1,  G2 = 2Y + 2D + n2,  G3 = D + n3.
std::array<double, 3> scm_factors(int y, double d_value, const std::array<double, 3>& noise);

/// Numeric value of domain index `d` among `k` domains: d / (k - 1), an
/// evenly spaced grid on [0, 1] whose mean is 0.5 like Bernoulli(0.5).
double domain_value(int d, int k);

/// Y, D ~ Bernoulli(0.5) independently; N(0, 1) factor noise.
std::vector<ScmSample> sample_scm(std::size_t n, std::uint64_t seed);

/// Same equations with D uniform on {0, ..., k - 1}, k >= 2.
std::vector<ScmSample> sample_scm_multi(std::size_t n, int k, std::uint64_t seed);

/// Seeded uniform split without replacement; throws InputError unless
/// n_test < samples.size().
ScmDataset train_test_split(const std::vector<ScmSample>& samples, std::size_t n_test,
                            std::uint64_t seed, int k = 2);

/// CSV with header g1,g2,g3,y,d.
void write_scm_csv(const std::vector<ScmSample>& samples, const std::filesystem::path& path);
std::vector<ScmSample> read_scm_csv(const std::filesystem::path& path);

}  // namespace causirl
