#include "causirl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "causirl/error.hpp"
#include "causirl/rng.hpp"

namespace causirl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Data

ExperimentData make_scm_data(const ScmDataset& dataset, std::string name) {
  auto convert = [](const std::vector<ScmSample>& samples) {
    LabeledSplit split;
    split.x.resize(static_cast<Eigen::Index>(samples.size()), 3);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (int j = 0; j < 3; ++j) {
        split.x(static_cast<Eigen::Index>(i), j) = samples[i].g[static_cast<std::size_t>(j)];
      }
      split.y.push_back(samples[i].y);
      split.d.push_back(samples[i].d);
    }
    return split;
  };
  ExperimentData data;
  data.name = std::move(name);
  data.train = convert(dataset.train);
  data.test = convert(dataset.test);
  data.num_domains = dataset.k;
  return data;
}

ExperimentData make_tabular_data(const EncodedTable& train, const EncodedTable& test, std::string name) {
  ExperimentData data;
  data.name = std::move(name);
  data.train = {train.features, train.target, train.sensitive};
  data.test = {test.features, test.target, test.sensitive};
  data.num_domains = 2;
  return data;
}

namespace {

fs::path resolve_data_dir(const DatasetConfig& cfg) {
  if (!cfg.data_dir.empty()) return cfg.data_dir;
  if (const char* env = std::getenv("CAUSIRL_DATA_DIR"); env && *env) return env;
  return "data/uci";
}

}  // namespace

ExperimentData load_experiment_data(const DatasetConfig& cfg) {
  switch (cfg.id) {
    case DatasetId::synthetic: {
      const auto samples = sample_scm(cfg.n_samples, cfg.data_seed);
      return make_scm_data(train_test_split(samples, cfg.n_test, cfg.data_seed), "synthetic");
    }
    case DatasetId::scm_multi: {
      const auto samples = sample_scm_multi(cfg.n_samples, cfg.domains, cfg.data_seed);
      return make_scm_data(train_test_split(samples, cfg.n_test, cfg.data_seed, cfg.domains),
                           "scm-multi");
    }
    case DatasetId::adult: {
      const fs::path dir = resolve_data_dir(cfg);
      const TabularDataset all = load_adult(dir / "adult.data", dir / "adult.test");
      const TabularDataset train = all.subset(SplitTag::train);
      const Preprocessor prep = fit_preprocessor(train, cfg.include_sensitive);
      return make_tabular_data(apply_preprocessor(prep, train),
                               apply_preprocessor(prep, all.subset(SplitTag::test)), "adult");
    }
    case DatasetId::german: {
      const fs::path dir = resolve_data_dir(cfg);
      TabularDataset all = load_german(dir / "german.data");
      assign_stratified_split(all, cfg.test_fraction, cfg.data_seed);
      const TabularDataset train = all.subset(SplitTag::train);
      const Preprocessor prep = fit_preprocessor(train, cfg.include_sensitive);
      return make_tabular_data(apply_preprocessor(prep, train),
                               apply_preprocessor(prep, all.subset(SplitTag::test)), "german");
    }
  }
  throw ConfigError("unknown dataset");
}

std::vector<LayerSpec> mlp_specs(Eigen::Index input, const std::vector<int>& hidden, bool batchnorm,
                                 Eigen::Index output) {
  std::vector<LayerSpec> specs;
  Eigen::Index width = input;
  for (int h : hidden) {
    specs.push_back(LayerSpec::dense(width, h));
    if (batchnorm) specs.push_back(LayerSpec::batchnorm(h));
    specs.push_back(LayerSpec::relu());
    width = h;
  }
  specs.push_back(LayerSpec::dense(width, output));
  return specs;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 2) throw ConfigError("batch size must be at least 2");
  if (latent_dim < 1) throw ConfigError("latent dimension must be positive");
  optim.validate();
  if (penalty) penalty->validate();
}

TrainConfig TrainConfig::from(const RunConfig& cfg) {
  TrainConfig out;
  out.dataset = dataset_name(cfg.dataset.id);
  out.encoder_hidden = cfg.model.encoder_hidden;
  out.encoder_batchnorm = cfg.model.encoder_batchnorm;
  out.latent_dim = cfg.model.latent_dim;
  out.head_hidden = cfg.model.head_hidden;
  out.penalty = cfg.penalty.kind();
  out.epochs = cfg.train.epochs;
  out.batch_size = cfg.train.batch_size;
  out.optim = cfg.train.optim;
  out.seed = cfg.run_seed();
  return out;
}

namespace {

// Draws fixed-size batches without replacement, reshuffling once the
// remaining rows cannot fill a batch.
class DomainSampler {
 public:
  explicit DomainSampler(std::vector<std::size_t> rows) : rows_(std::move(rows)) {}

  std::size_t size() const { return rows_.size(); }

  std::vector<std::size_t> draw(std::size_t batch, Rng& rng) {
    if (cursor_ + batch > order_.size()) {
      order_ = rows_;
      rng.shuffle(order_);
      cursor_ = 0;
    }
    std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch));
    cursor_ += batch;
    return out;
  }

 private:
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

TrainedModel train_encoder(const TrainConfig& cfg, const ExperimentData& data) {
  cfg.validate();
  const LabeledSplit& train = data.train;
  if (train.size() == 0) throw InputError("training split is empty");

  std::map<int, std::vector<std::size_t>> by_domain;
  for (std::size_t i = 0; i < train.size(); ++i) by_domain[train.d[i]].push_back(i);
  std::vector<DomainSampler> samplers;
  std::size_t smallest = train.size();
  for (auto& [domain, rows] : by_domain) {
    smallest = std::min(smallest, rows.size());
    samplers.emplace_back(std::move(rows));
  }
  const std::size_t domains = samplers.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), smallest);
  if (batch < 2 && cfg.encoder_batchnorm && !cfg.encoder_hidden.empty()) {
    throw DegenerateBatchError("smallest domain has fewer than 2 training rows");
  }
  const std::size_t steps_per_epoch = std::max<std::size_t>(1, smallest / batch);

  TrainedModel model{
      Mlp(mlp_specs(train.x.cols(), cfg.encoder_hidden, cfg.encoder_batchnorm, cfg.latent_dim),
          mix64(cfg.seed ^ 0x1ULL)),
      Mlp(mlp_specs(cfg.latent_dim, cfg.head_hidden, false, data.num_classes), mix64(cfg.seed ^ 0x2ULL)),
      {}, 0, 0, 0, 0, 0};
  AdamState enc_state = AdamState::for_params(model.encoder.params());
  AdamState head_state = AdamState::for_params(model.head.params());

  Rng batch_rng = Rng::substream(cfg.seed, "batches");
  Rng split_rng = Rng::substream(cfg.seed, "mixture-split");
  std::optional<DistanceFn> distance;
  if (cfg.penalty) distance = make_distance(cfg.penalty->distance);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const ScheduledRate rate = scheduled_lr(cfg.optim, epoch, cfg.epochs);
    if (rate.overrun) ++model.schedule_overruns;
    EpochStats stats;
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      std::vector<std::size_t> rows;
      rows.reserve(domains * batch);
      for (auto& sampler : samplers) {
        const auto drawn = sampler.draw(batch, batch_rng);
        rows.insert(rows.end(), drawn.begin(), drawn.end());
      }
      const Matrix x = gather_rows(train.x, rows);
      const Matrix latents = model.encoder.forward(x);
      const Matrix logits = model.head.forward(latents);

      Matrix grad_logits(logits.rows(), logits.cols());
      double ce = 0.0;
      std::vector<Matrix> domain_latents;
      for (std::size_t dom = 0; dom < domains; ++dom) {
        const auto offset = static_cast<Eigen::Index>(dom * batch);
        const auto count = static_cast<Eigen::Index>(batch);
        std::vector<int> labels(batch);
        for (std::size_t i = 0; i < batch; ++i) labels[i] = train.y[rows[dom * batch + i]];
        const LossAndGradient lg = softmax_cross_entropy(logits.middleRows(offset, count), labels);
        ce += lg.loss;
        grad_logits.middleRows(offset, count) = lg.grad / static_cast<double>(domains);
        domain_latents.push_back(latents.middleRows(offset, count));
      }
      ce /= static_cast<double>(domains);

      double penalty_value = 0.0;
      PenaltyResult penalty;
      if (cfg.penalty) {
        penalty = cfg.penalty->variant == PenaltyVariant::causirl_mixture
                      ? causirl_penalty(domain_latents, *distance, split_rng)
                      : pairwise_penalty(domain_latents, *distance);
        penalty_value = penalty.value;
        model.distance_evals += penalty.distance_evals;
        model.nonfinite_penalties += penalty.nonfinite;
        model.penalty_skips += penalty.skipped;
      }
      const double lambda = cfg.penalty ? cfg.penalty->lambda : 0.0;
      const double loss = ce + lambda * penalty_value;
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      }

      Matrix grad_latents;
      const GradientSet head_grads = model.head.backward(grad_logits, &grad_latents);
      if (cfg.penalty && lambda != 0.0) {
        for (std::size_t dom = 0; dom < domains; ++dom) {
          grad_latents.middleRows(static_cast<Eigen::Index>(dom * batch), static_cast<Eigen::Index>(batch)) +=
              lambda * penalty.grads[dom];
        }
      }
      const GradientSet enc_grads = model.encoder.backward(grad_latents);
      adam_step(model.encoder.params(), enc_grads, enc_state, cfg.optim, rate.lr);
      adam_step(model.head.params(), head_grads, head_state, cfg.optim, rate.lr);

      stats.loss += loss;
      stats.cross_entropy += ce;
      stats.penalty += penalty_value;
      ++model.steps;
    }
    const double n = static_cast<double>(steps_per_epoch);
    model.history.push_back({stats.loss / n, stats.cross_entropy / n, stats.penalty / n});
  }
  model.encoder.set_mode(Mode::eval);
  model.head.set_mode(Mode::eval);
  return model;
}

// ---------------------------------------------------------------------------
// Frozen evaluation

EvalProtocol EvalProtocol::from(const RunConfig& cfg) {
  EvalProtocol p;
  p.target = {cfg.eval.target_hidden, cfg.eval.target_epochs};
  p.adversary = {cfg.eval.adversary_hidden, cfg.eval.adversary_epochs};
  p.batch_size = cfg.eval.batch_size;
  p.optim = cfg.eval.optim;
  p.seed = mix64(cfg.run_seed() ^ 0xe7a1ULL);
  return p;
}

namespace {

double accuracy(const Mlp& net, const Matrix& x, const std::vector<int>& labels) {
  const std::vector<int> predicted = predict_classes(net.infer(x));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

struct DiscriminatorOutcome {
  std::vector<double> curve;
  double best = 0.0;
  int best_epoch = 0;
  std::size_t overruns = 0;
};

DiscriminatorOutcome train_discriminator(const Matrix& train_x, const std::vector<int>& train_y,
                                         const Matrix& test_x, const std::vector<int>& test_y,
                                         int classes, const DiscriminatorSpec& spec,
                                         const EvalProtocol& protocol, std::string_view tag) {
  Rng rng = Rng::substream(protocol.seed, tag);
  Mlp net(mlp_specs(train_x.cols(), spec.hidden, false, classes), rng.next());
  AdamState state = AdamState::for_params(net.params());
  const std::size_t n = train_y.size();
  const auto batch = static_cast<std::size_t>(protocol.batch_size);

  DiscriminatorOutcome out;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    const ScheduledRate rate = scheduled_lr(protocol.optim, epoch, spec.epochs);
    if (rate.overrun) ++out.overruns;
    const std::vector<std::size_t> order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<int> labels;
      labels.reserve(rows.size());
      for (std::size_t r : rows) labels.push_back(train_y[r]);
      auto [loss, grads] = net.backward_loss(gather_rows(train_x, rows), labels);
      (void)loss;
      adam_step(net.params(), grads, state, protocol.optim, rate.lr);
    }
    const double acc = accuracy(net, test_x, test_y);
    out.curve.push_back(acc);
    if (acc > out.best || epoch == 0) {
      out.best = acc;
      out.best_epoch = epoch;
    }
  }
  return out;
}

}  // namespace

EvalReport evaluate_frozen(const Mlp& encoder, const ExperimentData& data, const EvalProtocol& protocol) {
  if (encoder.mode() != Mode::eval) throw ContractError("evaluate_frozen requires an eval-mode encoder");
  if (data.test.size() == 0) throw InputError("test split is empty");
  if (data.train.size() == 0) throw InputError("training split is empty");
  if (protocol.batch_size < 1) throw ConfigError("discriminator batch size must be positive");
  protocol.optim.validate();

  const Matrix train_latents = encoder.infer(data.train.x);
  const Matrix test_latents = encoder.infer(data.test.x);

  const DiscriminatorOutcome target =
      train_discriminator(train_latents, data.train.y, test_latents, data.test.y, data.num_classes,
                          protocol.target, protocol, "target-discriminator");
  const DiscriminatorOutcome adversary =
      train_discriminator(train_latents, data.train.d, test_latents, data.test.d, data.num_domains,
                          protocol.adversary, protocol, "adversary-discriminator");

  EvalReport report;
  report.target_acc = target.best;
  report.best_epoch_target = target.best_epoch;
  report.final_target_acc = target.curve.back();
  report.target_curve = target.curve;
  report.adversary_acc = adversary.best;
  report.best_epoch_adv = adversary.best_epoch;
  report.final_adv_acc = adversary.curve.back();
  report.adversary_curve = adversary.curve;
  report.schedule_overruns = target.overruns + adversary.overruns;
  return report;
}

// ---------------------------------------------------------------------------
// Runs and sweeps

std::string make_run_id(const RunConfig& cfg) {
  return dataset_name(cfg.dataset.id) + "-" + cfg.penalty.variant_label() + "-" +
         cfg.penalty.distance_label() + "-lam" + format_double(cfg.penalty.lambda) + "-s" +
         std::to_string(cfg.train.seed);
}

RunRecord run_single(const RunConfig& cfg, const ExperimentData& data) {
  RunRecord record;
  record.run_id = make_run_id(cfg);
  record.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  try {
    TrainedModel model = train_encoder(TrainConfig::from(cfg), data);
    record.train_history = model.history;
    record.distance_evals = model.distance_evals;
    record.steps = model.steps;
    record.penalty_skips = model.penalty_skips;
    record.report = evaluate_frozen(model.encoder, data, EvalProtocol::from(cfg));
    record.report.nonfinite_penalties = model.nonfinite_penalties;
    record.report.schedule_overruns += model.schedule_overruns;
  } catch (const NumericError& e) {
    record.status = "numeric-failure";
    record.error = e.what();
  } catch (const std::exception& e) {
    record.status = "failed";
    record.error = e.what();
  }
  record.wall_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::vector<RunConfig> expand_grid(const RunConfig& tmpl) {
  tmpl.validate();
  if (tmpl.sweep.lambdas.empty() || tmpl.sweep.penalties.empty() || tmpl.sweep.distances.empty()) {
    throw ConfigError("sweep grid is empty");
  }
  std::vector<RunConfig> cells;
  std::set<std::string> seen;
  for (const auto& penalty : tmpl.sweep.penalties) {
    for (const auto& distance : tmpl.sweep.distances) {
      for (double lambda : tmpl.sweep.lambdas) {
        for (int seed = 0; seed < tmpl.sweep.seeds; ++seed) {
          RunConfig cell = tmpl;
          cell.penalty.enabled = penalty != "none";
          cell.penalty.variant =
              penalty == "pairwise" ? PenaltyVariant::pairwise_baseline : PenaltyVariant::causirl_mixture;
          cell.penalty.coral = distance == "coral";
          cell.penalty.lambda = lambda;
          cell.train.seed = static_cast<std::uint64_t>(seed);
          if (tmpl.sweep.redraw_data) cell.dataset.data_seed = tmpl.dataset.data_seed + cell.train.seed;
          if (seen.insert(make_run_id(cell)).second) cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::vector<RunRecord> run_sweep(const RunConfig& tmpl, const fs::path& results_dir, int threads) {
  const std::vector<RunConfig> cells = expand_grid(tmpl);
  ensure_writable_dir(results_dir);
  std::map<std::uint64_t, ExperimentData> datasets;
  for (const auto& cell : cells) {
    if (!datasets.contains(cell.dataset.data_seed)) {
      datasets.emplace(cell.dataset.data_seed, load_experiment_data(cell.dataset));
    }
  }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      records[i] = run_single(cells[i], datasets.at(cells[i].dataset.data_seed));
      persist_run(records[i], results_dir);
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  rebuild_results_csv(results_dir);
  return records;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string metrics_text(const RunRecord& r) {
  std::ostringstream out;
  const auto& rep = r.report;
  out << "run_id = " << r.run_id << '\n'
      << "dataset = " << dataset_name(r.config.dataset.id) << '\n'
      << "penalty = " << r.config.penalty.variant_label() << '\n'
      << "distance = " << r.config.penalty.distance_label() << '\n'
      << "lambda = " << format_double(r.config.penalty.lambda) << '\n'
      << "seed = " << r.config.train.seed << '\n'
      << "target_acc = " << format_double(rep.target_acc) << '\n'
      << "adversary_acc = " << format_double(rep.adversary_acc) << '\n'
      << "best_epoch_target = " << rep.best_epoch_target << '\n'
      << "best_epoch_adv = " << rep.best_epoch_adv << '\n'
      << "final_target_acc = " << format_double(rep.final_target_acc) << '\n'
      << "final_adv_acc = " << format_double(rep.final_adv_acc) << '\n'
      << "dist_evals = " << r.distance_evals << '\n'
      << "steps = " << r.steps << '\n'
      << "penalty_skips = " << r.penalty_skips << '\n'
      << "nonfinite_penalties = " << rep.nonfinite_penalties << '\n'
      << "schedule_overruns = " << rep.schedule_overruns << '\n'
      << "wall_secs = " << format_double(r.wall_secs) << '\n'
      << "status = " << r.status << '\n'
      << "error = " << r.error << '\n';
  return out.str();
}

std::map<std::string, std::string> parse_flat(const std::string& text, const fs::path& source) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ParseError(source.string() + ": malformed line '" + line + "'");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::string csv_row(const RunRecord& r) {
  const auto& rep = r.report;
  std::ostringstream out;
  out << r.run_id << ',' << dataset_name(r.config.dataset.id) << ',' << r.config.penalty.variant_label()
      << ',' << r.config.penalty.distance_label() << ',' << format_double(r.config.penalty.lambda) << ','
      << r.config.train.seed << ',' << format_double(rep.target_acc) << ','
      << format_double(rep.adversary_acc) << ',' << rep.best_epoch_target << ',' << rep.best_epoch_adv
      << ',' << format_double(rep.final_target_acc) << ',' << format_double(rep.final_adv_acc) << ','
      << r.distance_evals << ',' << format_double(r.wall_secs) << ',' << r.status;
  return out.str();
}

}  // namespace

fs::path persist_run(const RunRecord& record, const fs::path& results_dir) {
  const fs::path dir = results_dir / record.run_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create run directory " + dir.string());
  write_file(dir / "config.cfg", to_text(record.config));
  write_file(dir / "metrics.txt", metrics_text(record));

  std::ostringstream train;
  train << "epoch,loss,cross_entropy,penalty\n";
  for (std::size_t e = 0; e < record.train_history.size(); ++e) {
    const auto& h = record.train_history[e];
    train << e << ',' << format_double(h.loss) << ',' << format_double(h.cross_entropy) << ','
          << format_double(h.penalty) << '\n';
  }
  write_file(dir / "train_curve.csv", train.str());

  std::ostringstream eval;
  eval << "epoch,target_acc,adversary_acc\n";
  const std::size_t epochs = std::max(record.report.target_curve.size(), record.report.adversary_curve.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    eval << e << ',';
    if (e < record.report.target_curve.size()) eval << format_double(record.report.target_curve[e]);
    eval << ',';
    if (e < record.report.adversary_curve.size()) eval << format_double(record.report.adversary_curve[e]);
    eval << '\n';
  }
  write_file(dir / "eval_curve.csv", eval.str());
  return dir;
}

RunRecord read_run(const fs::path& run_dir) {
  RunRecord r;
  r.config = parse_run_config(read_file(run_dir / "config.cfg"));
  const auto m = parse_flat(read_file(run_dir / "metrics.txt"), run_dir / "metrics.txt");
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = m.find(key);
    if (it == m.end()) throw ParseError((run_dir / "metrics.txt").string() + ": missing " + key);
    return it->second;
  };
  try {
    r.run_id = get("run_id");
    r.report.target_acc = std::stod(get("target_acc"));
    r.report.adversary_acc = std::stod(get("adversary_acc"));
    r.report.best_epoch_target = std::stoi(get("best_epoch_target"));
    r.report.best_epoch_adv = std::stoi(get("best_epoch_adv"));
    r.report.final_target_acc = std::stod(get("final_target_acc"));
    r.report.final_adv_acc = std::stod(get("final_adv_acc"));
    r.report.nonfinite_penalties = std::stoul(get("nonfinite_penalties"));
    r.report.schedule_overruns = std::stoul(get("schedule_overruns"));
    r.distance_evals = std::stoul(get("dist_evals"));
    r.steps = std::stoul(get("steps"));
    r.penalty_skips = std::stoul(get("penalty_skips"));
    r.wall_secs = std::stod(get("wall_secs"));
  } catch (const std::logic_error&) {
    throw ParseError((run_dir / "metrics.txt").string() + ": malformed number");
  }
  r.status = get("status");
  r.error = get("error");
  return r;
}

std::vector<RunRecord> load_runs(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) throw InputError("results directory " + results_dir.string() + " not found");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "metrics.txt")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<RunRecord> runs;
  for (const auto& d : dirs) runs.push_back(read_run(d));
  return runs;
}

std::size_t rebuild_results_csv(const fs::path& results_dir) {
  const std::vector<RunRecord> runs = load_runs(results_dir);
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& r : runs) out << csv_row(r) << '\n';
  write_file(results_dir / "results.csv", out.str());
  return runs.size();
}

// ---------------------------------------------------------------------------
// Penalty cost

std::vector<PenaltyCost> penalty_cost_profile(const std::vector<int>& domain_counts,
                                              const DistanceKind& distance, int batch_per_domain,
                                              int steps, std::uint64_t seed) {
  if (batch_per_domain < 2 || steps < 1) throw ConfigError("cost profile needs batch >= 2, steps >= 1");
  const DistanceFn fn = make_distance(distance);
  std::vector<PenaltyCost> out;
  for (int k : domain_counts) {
    const auto n = static_cast<std::size_t>(k * batch_per_domain * 4);
    const auto samples = sample_scm_multi(n, k, seed);
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < samples.size(); ++i) rows[static_cast<std::size_t>(samples[i].d)].push_back(i);
    for (const auto& r : rows) {
      if (r.size() < static_cast<std::size_t>(batch_per_domain)) {
        throw InputError("not enough samples for a domain in the cost profile");
      }
    }
    Matrix features(static_cast<Eigen::Index>(samples.size()), 3);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (int j = 0; j < 3; ++j) features(static_cast<Eigen::Index>(i), j) = samples[i].g[static_cast<std::size_t>(j)];
    }
    Mlp encoder(mlp_specs(3, {10}, true, 5), seed);
    encoder.set_mode(Mode::eval);

    Rng rng = Rng::substream(seed, "cost-profile", static_cast<std::uint64_t>(k));
    std::size_t causirl_evals = 0;
    std::size_t causirl_skips = 0;
    std::size_t pairwise_evals = 0;
    double causirl_secs = 0.0;
    double pairwise_secs = 0.0;
    for (int step = 0; step < steps; ++step) {
      std::vector<Matrix> latents;
      for (auto& r : rows) {
        rng.shuffle(r);
        latents.push_back(encoder.infer(
            gather_rows(features, std::vector<std::size_t>(r.begin(), r.begin() + batch_per_domain))));
      }
      auto t0 = std::chrono::steady_clock::now();
      const PenaltyResult mixed = causirl_penalty(latents, fn, rng);
      causirl_evals += mixed.distance_evals;
      causirl_skips += mixed.skipped;
      auto t1 = std::chrono::steady_clock::now();
      pairwise_evals += pairwise_penalty(latents, fn).distance_evals;
      auto t2 = std::chrono::steady_clock::now();
      causirl_secs += std::chrono::duration<double>(t1 - t0).count();
      pairwise_secs += std::chrono::duration<double>(t2 - t1).count();
    }
    const double s = static_cast<double>(steps);
    out.push_back({k, static_cast<std::size_t>(steps), causirl_evals, causirl_skips, pairwise_evals,
                   causirl_secs / s, pairwise_secs / s});
  }
  return out;
}

}  // namespace causirl
