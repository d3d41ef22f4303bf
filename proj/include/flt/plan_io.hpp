#pragma once

#include <string>
#include <vector>

#include "flt/adaptive.hpp"
#include "flt/experiment.hpp"

namespace flt {

// One fully resolved cell of a simulation plan file.
struct PlanCell {
  std::string name;
  ExperimentPlan plan;
  // labels echoed into the results table
  std::string slope_label;  // zero | theta_kl | theta_g | custom
  double slope_param = 0.0;  // xi or tau
  int grid_points = 0;
};

struct SimulationPlan {
  int schema_version = 1;
  std::vector<PlanCell> cells;
};

// Parses and validates a JSON plan file; every cell is checked before
// anything runs. trials/seed overrides apply to all cells (0 = keep).
SimulationPlan read_plan_file(const std::string& path, int trials_override = 0,
                              std::uint64_t seed_override = 0,
                              bool has_seed_override = false);

struct ResultRow {
  std::string cell;
  std::string method;  // p1 | p2
  int n = 0;
  std::string slope_label;
  double slope_param = 0.0;
  double slope_norm = 0.0;
  int trials = 0;
  long long rejections = 0;
  double percent = 0.0;
  double ci_half_width = 0.0;
  double alpha = 0.0;
  int mc_replicates = 0;
  int grid_points = 0;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
};

std::string results_csv_header();
std::string format_result_row(const ResultRow& row);
// Reads (cell, method) keys of rows already present, so interrupted runs
// resume; returns the verbatim rows so they can be carried over.
std::vector<std::pair<std::string, std::string>> read_existing_results(
    const std::string& path, std::vector<std::string>* verbatim_rows);

// JSON report of one adaptive test run on user data.
std::string format_test_report(const AdaptiveTestResult& result, int rank,
                               int kbar, const std::string& config_json);

}  // namespace flt
