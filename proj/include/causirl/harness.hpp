#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "causirl/config.hpp"
#include "causirl/diffnet.hpp"
#include "causirl/optim.hpp"
#include "causirl/penalties.hpp"
#include "causirl/scm.hpp"
#include "causirl/tabular.hpp"

namespace causirl {

/// Features with target labels and domain (sensitive) indices.
struct LabeledSplit {
  Matrix x;
  std::vector<int> y;
  std::vector<int> d;

  std::size_t size() const { return y.size(); }
};

struct ExperimentData {
  std::string name;
  LabeledSplit train;
  LabeledSplit test;
  int num_domains = 2;
  int num_classes = 2;
};

/// Features (G1, G2, G3); D is withheld from the inputs.
ExperimentData make_scm_data(const ScmDataset& dataset, std::string name = "synthetic");
ExperimentData make_tabular_data(const EncodedTable& train, const EncodedTable& test, std::string name);

/// Builds the dataset a run config names (generating or loading as needed).
ExperimentData load_experiment_data(const DatasetConfig& cfg);

/// dense/[batchnorm]/relu per hidden width, then a dense output layer.
std::vector<LayerSpec> mlp_specs(Eigen::Index input, const std::vector<int>& hidden, bool batchnorm,
                                 Eigen::Index output);

struct TrainConfig {
  std::string dataset;
  std::vector<int> encoder_hidden{10};
  bool encoder_batchnorm = true;
  int latent_dim = 5;
  std::vector<int> head_hidden;
  std::optional<PenaltyKind> penalty;
  int epochs = 200;
  int batch_size = 64;  // rows drawn from EACH domain per step
  OptimConfig optim{1e-3, 0.9, 0.999, 1e-8, 5e-5, Schedule::constant};
  std::uint64_t seed = 0;

  void validate() const;
  static TrainConfig from(const RunConfig& cfg);
};

struct EpochStats {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double penalty = 0.0;
};

struct TrainedModel {
  Mlp encoder;
  Mlp head;
  std::vector<EpochStats> history;
  std::size_t steps = 0;
  std::size_t distance_evals = 0;
  std::size_t penalty_skips = 0;  // mixture steps with a side of <= 1 row
  std::size_t nonfinite_penalties = 0;
  std::size_t schedule_overruns = 0;
};

/// Penalized training of encoder + classifier head. Every step draws one
/// balanced batch per domain, runs the concatenated batch through the
/// encoder, adds mean per-domain cross-entropy and lambda * penalty on the
/// latents, and takes one Adam step. An epoch is one pass over the smallest
/// domain. Throws NumericError if the loss turns non-finite.
TrainedModel train_encoder(const TrainConfig& cfg, const ExperimentData& data);

struct DiscriminatorSpec {
  std::vector<int> hidden;
  int epochs = 100;
};

struct EvalProtocol {
  DiscriminatorSpec target;
  DiscriminatorSpec adversary;
  int batch_size = 64;
  OptimConfig optim{1e-3, 0.9, 0.999, 1e-8, 1e-3, Schedule::cosine};
  std::uint64_t seed = 0;

  static EvalProtocol from(const RunConfig& cfg);
};

struct EvalReport {
  double target_acc = 0.0;     // best test accuracy over epochs
  double adversary_acc = 0.0;  // best test accuracy over epochs
  int best_epoch_target = 0;
  int best_epoch_adv = 0;
  double final_target_acc = 0.0;
  double final_adv_acc = 0.0;
  std::vector<double> target_curve;
  std::vector<double> adversary_curve;
  std::size_t nonfinite_penalties = 0;
  std::size_t schedule_overruns = 0;
};

/// Trains a target discriminator (latent -> Y) and an adversary (latent -> D)
/// on the frozen encoder's latents, tracking test accuracy after every epoch.
/// The encoder must be in eval mode and is not modified.
EvalReport evaluate_frozen(const Mlp& encoder, const ExperimentData& data, const EvalProtocol& protocol);

struct RunRecord {
  std::string run_id;
  RunConfig config;
  EvalReport report;
  std::vector<EpochStats> train_history;
  double wall_secs = 0.0;
  std::size_t distance_evals = 0;
  std::size_t steps = 0;
  std::size_t penalty_skips = 0;
  std::string status = "ok";  // ok | failed | numeric-failure
  std::string error;
};

std::string make_run_id(const RunConfig& cfg);

/// Trains and evaluates one configuration; failures are captured in the
/// record rather than thrown.
RunRecord run_single(const RunConfig& cfg, const ExperimentData& data);

/// Expands the [sweep] grid of `tmpl` (penalties x distances x lambdas x
/// seeds), runs every cell on up to `threads` workers, persists each run
/// under `results_dir` and rebuilds the aggregate CSV. Throws IoError before
/// any training if `results_dir` is not writable.
std::vector<RunRecord> run_sweep(const RunConfig& tmpl, const std::filesystem::path& results_dir,
                                 int threads = 1);

/// Cells of the sweep grid in execution order.
std::vector<RunConfig> expand_grid(const RunConfig& tmpl);

/// Writes results_dir/<run_id>/{config.cfg, metrics.txt, train_curve.csv,
/// eval_curve.csv}.
std::filesystem::path persist_run(const RunRecord& record, const std::filesystem::path& results_dir);

/// Reads config and metrics back (curves are not reloaded).
RunRecord read_run(const std::filesystem::path& run_dir);

/// All runs found under `results_dir`, sorted by run id.
std::vector<RunRecord> load_runs(const std::filesystem::path& results_dir);

inline constexpr const char* kResultsHeader =
    "run_id,dataset,penalty,distance,lambda,seed,target_acc,adversary_acc,best_epoch_target,"
    "best_epoch_adv,final_target_acc,final_adv_acc,dist_evals,wall_secs,status";

/// Rebuilds results_dir/results.csv from the run subdirectories; returns the
/// number of rows written.
std::size_t rebuild_results_csv(const std::filesystem::path& results_dir);

/// Throws IoError unless `dir` exists (or can be created) and accepts files.
void ensure_writable_dir(const std::filesystem::path& dir);

struct PenaltyCost {
  int domains = 0;
  std::size_t steps = 0;
  std::size_t causirl_evals = 0;
  std::size_t causirl_skips = 0;  // steps where the mixture guard fired
  std::size_t pairwise_evals = 0;
  double causirl_secs_per_step = 0.0;
  double pairwise_secs_per_step = 0.0;
};

/// Encodes balanced batches from the k-domain SCM with a fixed random
/// encoder and times penalty evaluation (value + gradients) per step for
/// both variants.
std::vector<PenaltyCost> penalty_cost_profile(const std::vector<int>& domain_counts,
                                              const DistanceKind& distance, int batch_per_domain,
                                              int steps, std::uint64_t seed);

}  // namespace causirl
