#include "causirl/scm.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "causirl/error.hpp"
#include "causirl/rng.hpp"

namespace causirl {

std::array<double, 3> scm_factors(int y, double d_value, const std::array<double, 3>& noise) {
  const double yv = static_cast<double>(y);
  return {yv + noise[0], 2.0 * yv + 2.0 * d_value + noise[1], d_value + noise[2]};
}

double domain_value(int d, int k) {
  if (k < 2) throw ConfigError("domain count must be at least 2");
  if (d < 0 || d >= k) throw InputError("domain index out of range");
  return static_cast<double>(d) / static_cast<double>(k - 1);
}

namespace {

ScmSample draw(Rng& rng, int k) {
  ScmSample s;
  s.y = static_cast<int>(rng.uniform_int(2));
  s.d = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
  const std::array<double, 3> noise{rng.normal(), rng.normal(), rng.normal()};
  s.g = scm_factors(s.y, domain_value(s.d, k), noise);
  return s;
}

}  // namespace

std::vector<ScmSample> sample_scm(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InputError("sample count must be at least 1");
  Rng rng = Rng::substream(seed, "scm");
  std::vector<ScmSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng, 2));
  return out;
}

std::vector<ScmSample> sample_scm_multi(std::size_t n, int k, std::uint64_t seed) {
  if (n < 1) throw InputError("sample count must be at least 1");
  if (k < 2) throw ConfigError("multi-domain SCM needs k >= 2");
  Rng rng = Rng::substream(seed, "scm-multi", static_cast<std::uint64_t>(k));
  std::vector<ScmSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng, k));
  return out;
}

ScmDataset train_test_split(const std::vector<ScmSample>& samples, std::size_t n_test,
                            std::uint64_t seed, int k) {
  if (n_test >= samples.size()) {
    throw InputError("test size " + std::to_string(n_test) + " must be smaller than " +
                     std::to_string(samples.size()) + " samples");
  }
  Rng rng = Rng::substream(seed, "scm-split");
  const std::vector<std::size_t> order = rng.permutation(samples.size());
  ScmDataset out;
  out.k = k;
  out.test.reserve(n_test);
  out.train.reserve(samples.size() - n_test);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_test ? out.test : out.train).push_back(samples[order[i]]);
  }
  return out;
}

void write_scm_csv(const std::vector<ScmSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "g1,g2,g3,y,d\n";
  for (const auto& s : samples) {
    out << s.g[0] << ',' << s.g[1] << ',' << s.g[2] << ',' << s.y << ',' << s.d << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ScmSample> read_scm_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "g1,g2,g3,y,d") {
    throw ParseError(path.string() + ":1: expected header g1,g2,g3,y,d");
  }
  std::vector<ScmSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    ScmSample s;
    try {
      for (int i = 0; i < 3; ++i) s.g[static_cast<std::size_t>(i)] = std::stod(cells[static_cast<std::size_t>(i)]);
      s.y = std::stoi(cells[3]);
      s.d = std::stoi(cells[4]);
    } catch (const std::exception&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace causirl
