#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "causirl/harness.hpp"

namespace causirl {

enum class ReportFormat { csv, markdown };

struct GroupSummary {
  std::string dataset;
  std::string penalty;
  std::string distance;
  double lambda = 0.0;
  std::size_t n = 0;
  double target_mean = 0.0;
  double target_std = 0.0;  // unbiased; 0 when n == 1
  double adversary_mean = 0.0;
  double adversary_std = 0.0;
};

/// Groups successful runs by (dataset, penalty, distance, lambda), sorted by
/// those keys.
std::vector<GroupSummary> summarize(const std::vector<RunRecord>& runs);

/// Mean and unbiased standard deviation; std is 0 for a single value.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

/// Renders the lambda-vs-accuracy table for every run under `results_dir`.
/// Throws InputError when the directory holds no successful runs.
std::string emit_report(const std::filesystem::path& results_dir, ReportFormat format);

std::string render_report(const std::vector<GroupSummary>& groups, ReportFormat format);

}  // namespace causirl
