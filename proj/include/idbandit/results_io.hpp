#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "idbandit/experiment.hpp"

namespace idbandit {

struct StepRow {
  std::size_t run_id = 0;
  std::size_t step = 0;  // 1-based
  double reward = 0.0;
  double avg_cum_reward = 0.0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
};

struct AggregateRow {
  std::size_t step = 0;
  double mean_avg_cum_reward = 0.0;
  double se_avg_cum_reward = 0.0;
  double mean_cum_regret = 0.0;
  double se_cum_regret = 0.0;
};

std::vector<StepRow> step_rows(const std::vector<RunResult>& results);

/// Mean and standard error (sample sd / sqrt(runs); 0 for one run) per step.
std::vector<AggregateRow> aggregate_rows(const std::vector<RunResult>& results);

// Numbers are written with 17 significant digits so that parsing restores
// them exactly.
void write_step_csv(const std::string& path, const std::vector<StepRow>& rows);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::vector<StepRow> read_step_csv(const std::string& path);
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);

/// Two-panel SVG: average cumulative reward and cumulative regret, mean with
/// a one standard error band.
void write_plot_svg(const std::string& path, const std::vector<AggregateRow>& rows, const std::string& title);

nlohmann::json summary(const ExperimentConfig& config, const BanditInstance& instance,
                       const std::vector<RunResult>& results);

/// Writes steps.csv, aggregate.csv, summary.json, plot.svg (if enabled) and
/// snapshots.json (if enabled) under `dir`, creating it when missing.
void emit_results(const std::string& dir, const ExperimentConfig& config, const BanditInstance& instance,
                  const std::vector<RunResult>& results);

}  // namespace idbandit
