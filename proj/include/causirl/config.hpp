#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "causirl/optim.hpp"
#include "causirl/penalties.hpp"

namespace causirl {

enum class DatasetId { synthetic, scm_multi, adult, german };

std::string dataset_name(DatasetId id);
DatasetId parse_dataset(const std::string& name);

struct DatasetConfig {
  DatasetId id = DatasetId::synthetic;
  std::string data_dir;  // UCI files; empty -> $CAUSIRL_DATA_DIR or "data/uci"
  std::size_t n_samples = 1000;
  std::size_t n_test = 200;
  int domains = 2;  // scm-multi only
  std::uint64_t data_seed = 0;
  bool include_sensitive = true;
  double test_fraction = 0.2;  // german stratified split

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct ModelConfig {
  std::vector<int> encoder_hidden{10};
  bool encoder_batchnorm = true;
  int latent_dim = 5;
  std::vector<int> head_hidden;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct PenaltyConfig {
  bool enabled = true;
  PenaltyVariant variant = PenaltyVariant::causirl_mixture;
  bool coral = false;
  std::vector<double> gammas = MmdDistance{}.gammas;
  double lambda = 1.0;

  std::optional<PenaltyKind> kind() const;
  std::string variant_label() const;   // causirl | pairwise | none
  std::string distance_label() const;  // mmd | coral
  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

struct TrainSettings {
  int epochs = 200;
  int batch_size = 64;  // per domain
  OptimConfig optim{1e-3, 0.9, 0.999, 1e-8, 5e-5, Schedule::constant};
  std::uint64_t seed = 0;  // replicate index; combined with the master seed

  friend bool operator==(const TrainSettings& a, const TrainSettings& b) {
    return a.epochs == b.epochs && a.batch_size == b.batch_size && a.seed == b.seed &&
           a.optim.lr == b.optim.lr && a.optim.beta1 == b.optim.beta1 &&
           a.optim.beta2 == b.optim.beta2 && a.optim.eps == b.optim.eps &&
           a.optim.weight_decay == b.optim.weight_decay && a.optim.schedule == b.optim.schedule;
  }
};

struct EvalSettings {
  std::vector<int> target_hidden;
  std::vector<int> adversary_hidden;
  int target_epochs = 100;
  int adversary_epochs = 100;
  int batch_size = 64;
  OptimConfig optim{1e-3, 0.9, 0.999, 1e-8, 1e-3, Schedule::cosine};

  friend bool operator==(const EvalSettings& a, const EvalSettings& b) {
    return a.target_hidden == b.target_hidden && a.adversary_hidden == b.adversary_hidden &&
           a.target_epochs == b.target_epochs && a.adversary_epochs == b.adversary_epochs &&
           a.batch_size == b.batch_size && a.optim.lr == b.optim.lr &&
           a.optim.beta1 == b.optim.beta1 && a.optim.beta2 == b.optim.beta2 &&
           a.optim.eps == b.optim.eps && a.optim.weight_decay == b.optim.weight_decay &&
           a.optim.schedule == b.optim.schedule;
  }
};

struct SweepSettings {
  std::vector<double> lambdas{0.0, 0.1, 0.5, 1.0, 5.0, 10.0};
  int seeds = 3;
  std::vector<std::string> penalties{"causirl"};
  std::vector<std::string> distances{"mmd"};
  std::uint64_t master_seed = 0;
  // Seed index i uses dataset.data_seed + i, so every repetition draws its
  // own sample (synthetic) or split (german). No effect on adult.
  bool redraw_data = false;

  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

/// Sectioned key-value run configuration:
///
///   [dataset] name, data_dir, n_samples, n_test, domains, data_seed,
///             include_sensitive, test_fraction
///   [model]   encoder_hidden, encoder_batchnorm, latent_dim, head_hidden
///   [penalty] kind (causirl|pairwise|none), distance (mmd|coral), gammas, lambda
///   [train]   epochs, batch_size, lr, weight_decay, beta1, beta2, eps,
///             schedule (constant|cosine), seed
///   [eval]    target_hidden, adversary_hidden, target_epochs,
///             adversary_epochs, batch_size, lr, weight_decay, beta1, beta2,
///             eps, schedule
///   [sweep]   lambdas, seeds, penalties, distances, master_seed, redraw_data
///
/// Lists are comma separated; an empty value is an empty list. Every key is
/// optional and falls back to the defaults above; unknown sections or keys
/// are rejected. See README.md for the full table.
struct RunConfig {
  DatasetConfig dataset;
  ModelConfig model;
  PenaltyConfig penalty;
  TrainSettings train;
  EvalSettings eval;
  SweepSettings sweep;

  void validate() const;
  /// Seed driving every random stream of one run.
  std::uint64_t run_seed() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_text(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace causirl
