#include <doctest.h>

#include <filesystem>
#include <limits>
#include <set>

#include "causirl/config.hpp"
#include "causirl/error.hpp"
#include "causirl/harness.hpp"

using namespace causirl;

namespace {

const std::filesystem::path kConfigs = CAUSIRL_CONFIG_DIR;

}  // namespace

TEST_CASE("config: defaults round trip through text") {
  const RunConfig d;
  CHECK(parse_run_config(to_text(d)) == d);
  CHECK(parse_run_config("") == d);
}

TEST_CASE("config: every field survives a round trip") {
  RunConfig c;
  c.dataset.id = DatasetId::german;
  c.dataset.data_dir = "/tmp/uci";
  c.dataset.n_samples = 321;
  c.dataset.n_test = 21;
  c.dataset.domains = 7;
  c.dataset.data_seed = 99;
  c.dataset.include_sensitive = false;
  c.dataset.test_fraction = 0.3;
  c.model.encoder_hidden = {15, 8};
  c.model.encoder_batchnorm = false;
  c.model.latent_dim = 32;
  c.model.head_hidden = {4};
  c.penalty.variant = PenaltyVariant::pairwise_baseline;
  c.penalty.coral = true;
  c.penalty.gammas = {0.5, 2.0};
  c.penalty.lambda = 0.1 + 0.2;
  c.train.epochs = 3;
  c.train.batch_size = 17;
  c.train.optim.lr = 1.0 / 3.0;
  c.train.optim.weight_decay = 0.05;
  c.train.optim.beta1 = 0.8;
  c.train.optim.schedule = Schedule::cosine;
  c.train.seed = 4;
  c.eval.target_hidden = {64, 32};
  c.eval.adversary_hidden = {10};
  c.eval.target_epochs = 5;
  c.eval.adversary_epochs = 6;
  c.eval.batch_size = 128;
  c.eval.optim.schedule = Schedule::constant;
  c.sweep.lambdas = {0.0, 1e-3, 0.3};
  c.sweep.seeds = 5;
  c.sweep.penalties = {"causirl", "pairwise", "none"};
  c.sweep.distances = {"coral"};
  c.sweep.master_seed = 12345678901234ULL;
  c.sweep.redraw_data = true;
  CHECK(parse_run_config(to_text(c)) == c);

  c.penalty.enabled = false;
  CHECK(parse_run_config(to_text(c)).penalty.variant_label() == "none");
}

TEST_CASE("config: shortest round-trip number formatting") {
  for (double v : {0.0, 0.1, 1e-5, 5e-5, 1.0 / 3.0, 1e300, -2.5}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1000.0) == "1000");
}

TEST_CASE("config: unknown sections, keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_run_config("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[train]\nepoch = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("epochs = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[train]\nepochs = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[train]\nepochs = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[train]\nschedule = step\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[penalty]\nkind = coral\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[penalty]\ndistance = wasserstein\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[dataset]\nname = mnist\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[sweep]\nlambdas = 0,-1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[sweep]\nredraw_data = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_run_config(kConfigs / "missing.cfg"), IoError);
}

TEST_CASE("config: run seed depends on master seed and replicate") {
  RunConfig a;
  RunConfig b = a;
  CHECK(a.run_seed() == b.run_seed());
  b.train.seed = 1;
  CHECK(a.run_seed() != b.run_seed());
  b = a;
  b.sweep.master_seed = 1;
  CHECK(a.run_seed() != b.run_seed());
}

TEST_CASE("config: shipped configs parse and expand") {
  const RunConfig syn = load_run_config(kConfigs / "synthetic.cfg");
  CHECK(syn.dataset.id == DatasetId::synthetic);
  const auto cells = expand_grid(syn);
  CHECK(cells.size() == 18);
  std::set<std::string> ids;
  for (const auto& c : cells) ids.insert(make_run_id(c));
  CHECK(ids.size() == 18);

  const RunConfig adult = load_run_config(kConfigs / "adult.cfg");
  CHECK(adult.dataset.id == DatasetId::adult);
  CHECK(expand_grid(adult).size() == adult.sweep.lambdas.size());

  const RunConfig german = load_run_config(kConfigs / "german.cfg");
  CHECK(german.dataset.id == DatasetId::german);
  CHECK(expand_grid(german).size() == german.sweep.lambdas.size() * 3);
}

TEST_CASE("config: redraw_data gives each replicate its own data seed") {
  RunConfig t;
  t.dataset.data_seed = 10;
  t.sweep.lambdas = {0.0, 1.0};
  t.sweep.seeds = 3;
  for (const auto& c : expand_grid(t)) CHECK(c.dataset.data_seed == 10);
  t.sweep.redraw_data = true;
  for (const auto& c : expand_grid(t)) CHECK(c.dataset.data_seed == 10 + c.train.seed);
}
