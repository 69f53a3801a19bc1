// causirl command-line front end.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "causirl/config.hpp"
#include "causirl/error.hpp"
#include "causirl/harness.hpp"
#include "causirl/report.hpp"
#include "causirl/scm.hpp"
#include "fetch.hpp"

namespace fs = std::filesystem;
using namespace causirl;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

RunConfig load_config(const Globals& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Globals& g, const char* fallback) { return g.out.empty() ? fs::path(fallback) : fs::path(g.out); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

int cmd_gen_scm(const Globals& g, std::size_t n, std::size_t n_test, int domains) {
  const std::uint64_t seed = g.seed.value_or(0);
  const auto samples = domains == 2 ? sample_scm(n, seed) : sample_scm_multi(n, domains, seed);
  const ScmDataset data = train_test_split(samples, n_test, seed, domains);
  const fs::path dir = out_dir(g, ".");
  ensure_writable_dir(dir);
  write_scm_csv(data.train, dir / "train.csv");
  write_scm_csv(data.test, dir / "test.csv");
  std::cout << "train " << data.train.size() << " rows -> " << (dir / "train.csv").string() << '\n'
            << "test " << data.test.size() << " rows -> " << (dir / "test.csv").string() << '\n';
  return 0;
}

int cmd_train(const Globals& g) {
  RunConfig cfg = load_config(g);
  if (g.seed) cfg.train.seed = *g.seed;
  const fs::path dir = out_dir(g, "results");
  ensure_writable_dir(dir);
  const ExperimentData data = load_experiment_data(cfg.dataset);
  const RunRecord rec = run_single(cfg, data);
  persist_run(rec, dir);
  rebuild_results_csv(dir);
  if (rec.status != "ok") throw NumericError(rec.run_id + ": " + rec.error);
  std::cout << rec.run_id << " target_acc=" << format_double(rec.report.target_acc)
            << " adversary_acc=" << format_double(rec.report.adversary_acc) << '\n';
  return 0;
}

int cmd_sweep(const Globals& g) {
  RunConfig cfg = load_config(g);
  if (g.seed) cfg.sweep.master_seed = *g.seed;
  const fs::path dir = out_dir(g, "results");
  const auto records = run_sweep(cfg, dir, g.threads);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status != "ok";
  std::cout << records.size() << " runs (" << failed << " failed) -> " << (dir / "results.csv").string() << '\n';
  return failed == 0 ? 0 : 1;
}

int cmd_report(const Globals& g, const std::string& results, const std::string& format,
               const std::string& curve) {
  const fs::path dir = results.empty() ? out_dir(g, "results") : fs::path(results);
  const ReportFormat fmt = format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
  std::cout << emit_report(dir, fmt);
  if (!curve.empty()) write_text(curve, emit_report(dir, ReportFormat::csv));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CausIRL invariance penalty experiments", "causirl"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "run config file");
  app.add_option("--seed", g.seed, "seed override");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "sweep worker threads")->check(CLI::PositiveNumber);

  auto* fetch = app.add_subcommand("fetch", "download UCI files and verify checksums");
  std::string mirror;
  fetch->add_option("--from", mirror, "copy from a local mirror directory instead of downloading");

  auto* gen = app.add_subcommand("gen-scm", "write a synthetic SCM train/test split");
  std::size_t n = 1000;
  std::size_t n_test = 200;
  int domains = 2;
  gen->add_option("--n", n, "total samples");
  gen->add_option("--test", n_test, "test samples");
  gen->add_option("--domains", domains, "number of domains")->check(CLI::Range(2, 1 << 20));

  auto* train = app.add_subcommand("train", "train and evaluate one configuration");
  auto* sweep = app.add_subcommand("sweep", "run the [sweep] grid of a configuration");

  auto* report = app.add_subcommand("report", "summarise a results directory");
  std::string results;
  std::string format = "markdown";
  std::string curve;
  report->add_option("results", results, "results directory (default: --out or results/)");
  report->add_option("--format", format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  report->add_option("--curve", curve, "also write the lambda-vs-accuracy CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "causirl: error[usage]: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*fetch) {
      cli::fetch_uci(out_dir(g, "data/uci"), mirror.empty() ? std::nullopt : std::optional<fs::path>(mirror));
      return 0;
    }
    if (*gen) return cmd_gen_scm(g, n, n_test, domains);
    if (*train) return cmd_train(g);
    if (*sweep) return cmd_sweep(g);
    if (*report) return cmd_report(g, results, format, curve);
  } catch (const Error& e) {
    std::cerr << "causirl: error[" << e.kind() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "causirl: error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
