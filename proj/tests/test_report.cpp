#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "causirl/error.hpp"
#include "causirl/report.hpp"

using namespace causirl;
namespace fs = std::filesystem;

namespace {

RunRecord fake_run(double lambda, std::uint64_t seed, double target, double adversary) {
  RunRecord r;
  r.config.penalty.lambda = lambda;
  r.config.train.seed = seed;
  r.run_id = make_run_id(r.config);
  r.report.target_acc = target;
  r.report.adversary_acc = adversary;
  r.report.target_curve = {target};
  r.report.adversary_curve = {adversary};
  return r;
}

std::size_t count_table_rows(const std::string& md) {
  std::size_t rows = 0;
  std::size_t pos = 0;
  while ((pos = md.find("\n| ", pos)) != std::string::npos) {
    ++rows;
    ++pos;
  }
  return rows;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("report: unbiased mean and std") {
  const auto [m, s] = mean_and_std({0.80, 0.90});
  CHECK(m == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(s == doctest::Approx(std::sqrt(0.005)).epsilon(1e-12));
  CHECK(s == doctest::Approx(0.0707).epsilon(1e-3));
  const auto [m1, s1] = mean_and_std({0.7});
  CHECK(m1 == 0.7);
  CHECK(s1 == 0.0);
}

TEST_CASE("report: grouping by lambda") {
  std::vector<RunRecord> runs{fake_run(1.0, 0, 0.80, 0.6), fake_run(1.0, 1, 0.90, 0.5), fake_run(0.0, 0, 0.7, 0.7)};
  RunRecord failed = fake_run(1.0, 2, 0.1, 0.1);
  failed.status = "failed";
  runs.push_back(failed);
  const auto groups = summarize(runs);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].lambda == 0.0);
  CHECK(groups[0].n == 1);
  CHECK(groups[0].target_std == 0.0);
  CHECK(groups[1].n == 2);
  CHECK(groups[1].target_mean == doctest::Approx(0.85));
  CHECK(groups[1].adversary_mean == doctest::Approx(0.55));

  const std::string md = render_report(groups, ReportFormat::markdown);
  CHECK(md.find("(n=1)") != std::string::npos);
  CHECK(md.find("unbiased") != std::string::npos);
  CHECK(count_table_rows(md) == 1 + 2);  // header and two groups

  const std::string csv = render_report(groups, ReportFormat::csv);
  CHECK(csv.rfind("dataset,penalty,distance,lambda,n,target_mean,target_std,adversary_mean,adversary_std\n", 0) == 0);
  CHECK(csv.find("synthetic,causirl,mmd,1,2,0.850000,0.070711,0.550000,0.070711") != std::string::npos);
}

TEST_CASE("report: six lambda rows for the synthetic grid, rebuilt byte-identically") {
  TempDir dir("causirl_report");
  for (double lambda : {0.0, 0.1, 0.5, 1.0, 5.0, 10.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      persist_run(fake_run(lambda, seed, 0.5 + 0.01 * static_cast<double>(seed), 0.6), dir.path);
    }
  }
  const std::string first = emit_report(dir.path, ReportFormat::markdown);
  CHECK(count_table_rows(first) == 1 + 6);
  CHECK(emit_report(dir.path, ReportFormat::markdown) == first);
  CHECK(emit_report(dir.path, ReportFormat::csv) == emit_report(dir.path, ReportFormat::csv));
}

TEST_CASE("report: empty results are an input error") {
  TempDir dir("causirl_report_empty");
  CHECK_THROWS_AS(emit_report(dir.path, ReportFormat::markdown), InputError);
  CHECK_THROWS_AS(emit_report(dir.path / "missing", ReportFormat::csv), InputError);
}
