#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "idbandit/environments.hpp"
#include "idbandit/policies.hpp"

namespace idbandit {

// Experiment config document:
//   {
//     "environment": {"name": "cascade1", "overrides": {"L": 20}},
//     "policy": {"kind": "idTSvi", "epsilon": 1e-4, "max_sweeps": 1, "max_iters": 30,
//                "particles": 20, "sigma": 0.05, "warm_start": false, "jitter": false,
//                "prior": {"params": [...]}},
//     "horizon": 20000, "runs": 20, "base_seed": 1, "threads": 0,
//     "output": {"dir": "out", "plot": true, "snapshots": false}
//   }
// Only "environment.name" and "policy.kind" are required.
struct ExperimentConfig {
  std::string environment = "cascade1";
  nlohmann::json overrides = nlohmann::json::object();
  PolicyConfig policy;
  std::size_t horizon = 1000;
  std::size_t runs = 1;
  std::uint64_t base_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string out_dir;
  bool plot = true;
  bool snapshots = false;
};

ExperimentConfig experiment_from_json(const nlohmann::json& doc);
nlohmann::json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment(const std::string& path);

/// Throws ConfigError on invalid settings.
void validate_experiment(const ExperimentConfig& config);

struct RunResult {
  std::size_t run = 0;
  std::vector<double> rewards;
  std::vector<double> regrets;
  std::vector<Action> actions;
  double seconds = 0.0;  // policy act + update only
  nlohmann::json snapshot;
};

/// One run: act, sample under theta*, update, record reward and exact regret.
RunResult run_once(const BanditInstance& instance, const PolicyConfig& policy, std::size_t horizon,
                   std::uint64_t base_seed, std::size_t run);

/// All runs, possibly concurrent, ordered by run index.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// (1/t) sum_{s <= t} r_s for every t.
std::vector<double> average_cumulative_reward(const std::vector<double>& rewards);

std::vector<double> cumulative_regret(const RunResult& run);

}  // namespace idbandit
