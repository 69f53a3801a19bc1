#include "causirl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "causirl/error.hpp"
#include "causirl/rng.hpp"

namespace causirl {

namespace {

using Section = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  return s.substr(begin, s.find_last_not_of(" \t\r\n") - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
  std::int64_t value = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  return out;
}

Schedule to_schedule(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "constant") return Schedule::constant;
  if (t == "cosine") return Schedule::cosine;
  throw ConfigError(key + ": expected constant or cosine, got '" + text + "'");
}

std::string schedule_name(Schedule s) { return s == Schedule::constant ? "constant" : "cosine"; }

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  return join(v, [](int x) { return std::to_string(x); });
}
std::string join_doubles(const std::vector<double>& v) { return join(v, format_double); }
std::string join_strings(const std::vector<std::string>& v) {
  return join(v, [](const std::string& s) { return s; });
}

// Reads `key` from `section` when present, then erases it so leftovers can
// be reported as unknown.
class SectionReader {
 public:
  SectionReader(std::string name, Section values) : name_(std::move(name)), values_(std::move(values)) {}

  template <typename F>
  void read(const std::string& key, F&& apply) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    apply(name_ + "." + key, it->second);
    values_.erase(it);
  }

  void finish() const {
    if (!values_.empty()) {
      throw ConfigError("unknown key '" + name_ + "." + values_.begin()->first + "'");
    }
  }

 private:
  std::string name_;
  Section values_;
};

void read_optim(SectionReader& r, OptimConfig& optim) {
  r.read("lr", [&](const auto& k, const auto& v) { optim.lr = to_double(k, v); });
  r.read("weight_decay", [&](const auto& k, const auto& v) { optim.weight_decay = to_double(k, v); });
  r.read("beta1", [&](const auto& k, const auto& v) { optim.beta1 = to_double(k, v); });
  r.read("beta2", [&](const auto& k, const auto& v) { optim.beta2 = to_double(k, v); });
  r.read("eps", [&](const auto& k, const auto& v) { optim.eps = to_double(k, v); });
  r.read("schedule", [&](const auto& k, const auto& v) { optim.schedule = to_schedule(k, v); });
}

void write_optim(std::ostream& out, const OptimConfig& optim) {
  out << "lr = " << format_double(optim.lr) << '\n'
      << "weight_decay = " << format_double(optim.weight_decay) << '\n'
      << "beta1 = " << format_double(optim.beta1) << '\n'
      << "beta2 = " << format_double(optim.beta2) << '\n'
      << "eps = " << format_double(optim.eps) << '\n'
      << "schedule = " << schedule_name(optim.schedule) << '\n';
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw ConfigError("cannot format number");
  return std::string(buf, ptr);
}

std::string dataset_name(DatasetId id) {
  switch (id) {
    case DatasetId::synthetic: return "synthetic";
    case DatasetId::scm_multi: return "scm-multi";
    case DatasetId::adult: return "adult";
    case DatasetId::german: return "german";
  }
  return "synthetic";
}

DatasetId parse_dataset(const std::string& name) {
  const std::string t = trim(name);
  if (t == "synthetic") return DatasetId::synthetic;
  if (t == "scm-multi") return DatasetId::scm_multi;
  if (t == "adult") return DatasetId::adult;
  if (t == "german") return DatasetId::german;
  throw ConfigError("dataset.name: unknown dataset '" + name + "'");
}

std::optional<PenaltyKind> PenaltyConfig::kind() const {
  if (!enabled) return std::nullopt;
  PenaltyKind k;
  k.variant = variant;
  k.lambda = lambda;
  if (coral) {
    k.distance = CoralDistance{};
  } else {
    k.distance = MmdDistance{gammas};
  }
  return k;
}

std::string PenaltyConfig::variant_label() const {
  return enabled ? penalty_name(variant) : std::string("none");
}

std::string PenaltyConfig::distance_label() const { return coral ? "coral" : "mmd"; }

void RunConfig::validate() const {
  if (dataset.n_samples < 2) throw ConfigError("dataset.n_samples must be at least 2");
  if (dataset.domains < 2) throw ConfigError("dataset.domains must be at least 2");
  if (model.latent_dim < 1) throw ConfigError("model.latent_dim must be positive");
  for (int h : model.encoder_hidden) {
    if (h < 1) throw ConfigError("model.encoder_hidden entries must be positive");
  }
  for (int h : model.head_hidden) {
    if (h < 1) throw ConfigError("model.head_hidden entries must be positive");
  }
  if (auto k = penalty.kind()) k->validate();
  if (train.epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (train.batch_size < 2) throw ConfigError("train.batch_size must be at least 2");
  train.optim.validate();
  if (eval.target_epochs < 1 || eval.adversary_epochs < 1) {
    throw ConfigError("eval epochs must be at least 1");
  }
  if (eval.batch_size < 1) throw ConfigError("eval.batch_size must be positive");
  eval.optim.validate();
  if (sweep.seeds < 1) throw ConfigError("sweep.seeds must be at least 1");
  for (const auto& p : sweep.penalties) {
    if (p != "causirl" && p != "pairwise" && p != "none") {
      throw ConfigError("sweep.penalties: unknown penalty '" + p + "'");
    }
  }
  for (const auto& d : sweep.distances) {
    if (d != "mmd" && d != "coral") throw ConfigError("sweep.distances: unknown distance '" + d + "'");
  }
  for (double l : sweep.lambdas) {
    if (!std::isfinite(l) || l < 0.0) throw ConfigError("sweep.lambdas must be finite and >= 0");
  }
}

std::uint64_t RunConfig::run_seed() const {
  return mix64(mix64(sweep.master_seed) ^ (train.seed + 0x632be59bd9b4e019ULL));
}

RunConfig parse_run_config(const std::string& text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  std::map<std::string, Section> sections;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      throw ConfigError("key '" + name + "' is outside any section");
    }
    Section values;
    for (const auto& [key, value] : node) values[key] = value.data();
    sections[name] = std::move(values);
  }
  static const std::set<std::string> known{"dataset", "model", "penalty", "train", "eval", "sweep"};
  for (const auto& [name, _] : sections) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
  }

  RunConfig cfg;
  {
    SectionReader r("dataset", sections["dataset"]);
    auto& d = cfg.dataset;
    r.read("name", [&](const auto&, const auto& v) { d.id = parse_dataset(v); });
    r.read("data_dir", [&](const auto&, const auto& v) { d.data_dir = trim(v); });
    r.read("n_samples", [&](const auto& k, const auto& v) { d.n_samples = to_u64(k, v); });
    r.read("n_test", [&](const auto& k, const auto& v) { d.n_test = to_u64(k, v); });
    r.read("domains", [&](const auto& k, const auto& v) { d.domains = static_cast<int>(to_int(k, v)); });
    r.read("data_seed", [&](const auto& k, const auto& v) { d.data_seed = to_u64(k, v); });
    r.read("include_sensitive", [&](const auto& k, const auto& v) { d.include_sensitive = to_bool(k, v); });
    r.read("test_fraction", [&](const auto& k, const auto& v) { d.test_fraction = to_double(k, v); });
    r.finish();
  }
  {
    SectionReader r("model", sections["model"]);
    auto& m = cfg.model;
    r.read("encoder_hidden", [&](const auto& k, const auto& v) { m.encoder_hidden = to_int_list(k, v); });
    r.read("encoder_batchnorm", [&](const auto& k, const auto& v) { m.encoder_batchnorm = to_bool(k, v); });
    r.read("latent_dim", [&](const auto& k, const auto& v) { m.latent_dim = static_cast<int>(to_int(k, v)); });
    r.read("head_hidden", [&](const auto& k, const auto& v) { m.head_hidden = to_int_list(k, v); });
    r.finish();
  }
  {
    SectionReader r("penalty", sections["penalty"]);
    auto& p = cfg.penalty;
    r.read("kind", [&](const auto& k, const auto& v) {
      const std::string t = trim(v);
      if (t == "none") {
        p.enabled = false;
      } else if (t == "causirl") {
        p.enabled = true;
        p.variant = PenaltyVariant::causirl_mixture;
      } else if (t == "pairwise") {
        p.enabled = true;
        p.variant = PenaltyVariant::pairwise_baseline;
      } else {
        throw ConfigError(k + ": expected causirl, pairwise or none, got '" + v + "'");
      }
    });
    r.read("distance", [&](const auto& k, const auto& v) {
      const std::string t = trim(v);
      if (t != "mmd" && t != "coral") throw ConfigError(k + ": expected mmd or coral, got '" + v + "'");
      p.coral = t == "coral";
    });
    r.read("gammas", [&](const auto& k, const auto& v) { p.gammas = to_double_list(k, v); });
    r.read("lambda", [&](const auto& k, const auto& v) { p.lambda = to_double(k, v); });
    r.finish();
  }
  {
    SectionReader r("train", sections["train"]);
    auto& t = cfg.train;
    r.read("epochs", [&](const auto& k, const auto& v) { t.epochs = static_cast<int>(to_int(k, v)); });
    r.read("batch_size", [&](const auto& k, const auto& v) { t.batch_size = static_cast<int>(to_int(k, v)); });
    r.read("seed", [&](const auto& k, const auto& v) { t.seed = to_u64(k, v); });
    read_optim(r, t.optim);
    r.finish();
  }
  {
    SectionReader r("eval", sections["eval"]);
    auto& e = cfg.eval;
    r.read("target_hidden", [&](const auto& k, const auto& v) { e.target_hidden = to_int_list(k, v); });
    r.read("adversary_hidden", [&](const auto& k, const auto& v) { e.adversary_hidden = to_int_list(k, v); });
    r.read("target_epochs", [&](const auto& k, const auto& v) { e.target_epochs = static_cast<int>(to_int(k, v)); });
    r.read("adversary_epochs",
           [&](const auto& k, const auto& v) { e.adversary_epochs = static_cast<int>(to_int(k, v)); });
    r.read("batch_size", [&](const auto& k, const auto& v) { e.batch_size = static_cast<int>(to_int(k, v)); });
    read_optim(r, e.optim);
    r.finish();
  }
  {
    SectionReader r("sweep", sections["sweep"]);
    auto& s = cfg.sweep;
    r.read("lambdas", [&](const auto& k, const auto& v) { s.lambdas = to_double_list(k, v); });
    r.read("seeds", [&](const auto& k, const auto& v) { s.seeds = static_cast<int>(to_int(k, v)); });
    r.read("penalties", [&](const auto&, const auto& v) { s.penalties = split_list(v); });
    r.read("distances", [&](const auto&, const auto& v) { s.distances = split_list(v); });
    r.read("master_seed", [&](const auto& k, const auto& v) { s.master_seed = to_u64(k, v); });
    r.read("redraw_data", [&](const auto& k, const auto& v) { s.redraw_data = to_bool(k, v); });
    r.finish();
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& d = cfg.dataset;
  out << "[dataset]\n"
      << "name = " << dataset_name(d.id) << '\n'
      << "data_dir = " << d.data_dir << '\n'
      << "n_samples = " << d.n_samples << '\n'
      << "n_test = " << d.n_test << '\n'
      << "domains = " << d.domains << '\n'
      << "data_seed = " << d.data_seed << '\n'
      << "include_sensitive = " << (d.include_sensitive ? "true" : "false") << '\n'
      << "test_fraction = " << format_double(d.test_fraction) << "\n\n";
  const auto& m = cfg.model;
  out << "[model]\n"
      << "encoder_hidden = " << join_ints(m.encoder_hidden) << '\n'
      << "encoder_batchnorm = " << (m.encoder_batchnorm ? "true" : "false") << '\n'
      << "latent_dim = " << m.latent_dim << '\n'
      << "head_hidden = " << join_ints(m.head_hidden) << "\n\n";
  const auto& p = cfg.penalty;
  out << "[penalty]\n"
      << "kind = " << p.variant_label() << '\n'
      << "distance = " << p.distance_label() << '\n'
      << "gammas = " << join_doubles(p.gammas) << '\n'
      << "lambda = " << format_double(p.lambda) << "\n\n";
  const auto& t = cfg.train;
  out << "[train]\n"
      << "epochs = " << t.epochs << '\n'
      << "batch_size = " << t.batch_size << '\n'
      << "seed = " << t.seed << '\n';
  write_optim(out, t.optim);
  const auto& e = cfg.eval;
  out << "\n[eval]\n"
      << "target_hidden = " << join_ints(e.target_hidden) << '\n'
      << "adversary_hidden = " << join_ints(e.adversary_hidden) << '\n'
      << "target_epochs = " << e.target_epochs << '\n'
      << "adversary_epochs = " << e.adversary_epochs << '\n'
      << "batch_size = " << e.batch_size << '\n';
  write_optim(out, e.optim);
  const auto& s = cfg.sweep;
  out << "\n[sweep]\n"
      << "lambdas = " << join_doubles(s.lambdas) << '\n'
      << "seeds = " << s.seeds << '\n'
      << "penalties = " << join_strings(s.penalties) << '\n'
      << "distances = " << join_strings(s.distances) << '\n'
      << "master_seed = " << s.master_seed << '\n'
      << "redraw_data = " << (s.redraw_data ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace causirl
