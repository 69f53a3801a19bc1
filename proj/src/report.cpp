#include "causirl/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "causirl/error.hpp"

namespace causirl {

namespace {

std::string fixed(double value, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

std::vector<GroupSummary> summarize(const std::vector<RunRecord>& runs) {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : runs) {
    if (r.status != "ok") continue;
    Key key{dataset_name(r.config.dataset.id), r.config.penalty.variant_label(),
            r.config.penalty.distance_label(), r.config.penalty.lambda};
    groups[key].first.push_back(r.report.target_acc);
    groups[key].second.push_back(r.report.adversary_acc);
  }
  std::vector<GroupSummary> out;
  for (const auto& [key, accs] : groups) {
    GroupSummary g;
    std::tie(g.dataset, g.penalty, g.distance, g.lambda) = key;
    g.n = accs.first.size();
    std::tie(g.target_mean, g.target_std) = mean_and_std(accs.first);
    std::tie(g.adversary_mean, g.adversary_std) = mean_and_std(accs.second);
    out.push_back(g);
  }
  return out;
}

std::string render_report(const std::vector<GroupSummary>& groups, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << "dataset,penalty,distance,lambda,n,target_mean,target_std,adversary_mean,adversary_std\n";
    for (const auto& g : groups) {
      out << g.dataset << ',' << g.penalty << ',' << g.distance << ',' << format_double(g.lambda) << ','
          << g.n << ',' << fixed(g.target_mean, 6) << ',' << fixed(g.target_std, 6) << ','
          << fixed(g.adversary_mean, 6) << ',' << fixed(g.adversary_std, 6) << '\n';
    }
    return out.str();
  }
  out << "# Invariance / accuracy trade-off\n\n"
      << "Accuracies are best test accuracy over discriminator epochs, reported as "
         "mean ± unbiased standard deviation over seeds (n runs per row).\n\n"
      << "| dataset | penalty | distance | lambda | n | target acc (%) | adversary acc (%) |\n"
      << "|---|---|---|---|---|---|---|\n";
  for (const auto& g : groups) {
    const std::string note = g.n == 1 ? " (n=1)" : "";
    out << "| " << g.dataset << " | " << g.penalty << " | " << g.distance << " | "
        << format_double(g.lambda) << " | " << g.n << " | " << fixed(100.0 * g.target_mean, 1) << " ± "
        << fixed(100.0 * g.target_std, 1) << note << " | " << fixed(100.0 * g.adversary_mean, 1) << " ± "
        << fixed(100.0 * g.adversary_std, 1) << note << " |\n";
  }
  return out.str();
}

std::string emit_report(const std::filesystem::path& results_dir, ReportFormat format) {
  const std::vector<GroupSummary> groups = summarize(load_runs(results_dir));
  if (groups.empty()) throw InputError("no completed runs under " + results_dir.string());
  return render_report(groups, format);
}

}  // namespace causirl
