#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "idbandit/analytics.hpp"
#include "idbandit/diagram_io.hpp"
#include "idbandit/environments.hpp"
#include "idbandit/errors.hpp"
#include "idbandit/experiment.hpp"
#include "idbandit/results_io.hpp"
#include "idbandit/simd/kernels.hpp"

using namespace idbandit;

namespace {

nlohmann::json parse_overrides(const std::string& text) {
  if (text.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("--set expects a JSON object: ") + e.what());
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::size_t runs, std::size_t horizon,
            long long seed, std::size_t threads) {
  ExperimentConfig config = load_experiment(config_path);
  if (runs > 0) config.runs = runs;
  if (horizon > 0) config.horizon = horizon;
  if (seed >= 0) config.base_seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) config.threads = threads;
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (config.out_dir.empty()) throw ConfigError("no output directory: pass --out-dir or set output.dir");
  validate_experiment(config);
  const auto instance = make_environment(config.environment, config.overrides);
  const auto results = run_experiment(config);
  emit_results(config.out_dir, config, instance, results);
  const auto s = summary(config, instance, results);
  std::printf("%s %s: %zu runs x %zu steps, final average cumulative reward %.4f +- %.4f, cumulative regret %.2f\n",
              config.environment.c_str(), to_string(config.policy.kind).c_str(), config.runs, config.horizon,
              s["final_avg_cum_reward"]["mean"].get<double>(), s["final_avg_cum_reward"]["se"].get<double>(),
              s["final_cum_regret"]["mean"].get<double>());
  std::printf("policy time per run %.3f s; results in %s\n", s["policy_seconds"]["mean"].get<double>(),
              config.out_dir.c_str());
  return 0;
}

int cmd_omax(const std::string& env, const std::string& overrides, std::size_t samples, std::uint64_t seed,
             double horizon, double C) {
  const auto instance = make_environment(env, parse_overrides(overrides));
  Rng rng = make_rng(seed, 0, Stream::Analytics);
  const auto& d = *instance.diagram;
  const auto est = estimate_o_max(instance, uniform_prior(d.param_count()), samples, rng);
  std::printf("environment %s: d = %zu, L = %zu, |X| = %zu, |Z| = %zu\n", env.c_str(), d.d(), d.decision_param_count(),
              d.observed_nodes().size(), d.latent_nodes().size());
  std::printf("O_max = %.4f (%zu samples per action)\n", est.value, samples);
  std::printf("bound value at n = %.0f with C = %g: %.2f\n", horizon, C,
              bound_value(C, d.decision_param_count(), d.d(), est.value, horizon, d.reward_bound()));
  return 0;
}

int cmd_check(const std::string& env, const std::string& overrides, std::size_t points, double step) {
  const auto instance = make_environment(env, parse_overrides(overrides));
  const auto& d = *instance.diagram;
  const auto report = validate_diagram(d);
  std::printf("environment %s: %s\n", env.c_str(), report.ok() ? "valid" : report.summary().c_str());
  std::printf("parameters: d = %zu, L = %zu; optimal value %.6f at (", d.d(), d.decision_param_count(),
              instance.optimal_value);
  for (std::size_t k = 0; k < instance.optimal_action.size(); ++k)
    std::printf("%s%d", k ? ", " : "", instance.optimal_action[k]);
  std::printf(")\n");
  const auto grid = monotonicity_grid(points, step);
  bool all_monotone = true;
  for (std::size_t i = 0; i < d.param_count(); ++i) {
    const auto m = check_monotonicity(instance, instance.theta_star, i, grid, step);
    all_monotone = all_monotone && m != Monotonicity::Violated;
    const auto& owner = d.param_owner(i);
    std::string what = owner.decision ? d.definition().domains[owner.domain].name + "[" + std::to_string(owner.value) + "]"
                                      : d.node(owner.node).name + "|" + std::to_string(owner.config);
    std::printf("  theta[%zu] %-14s %s\n", i, what.c_str(), to_string(m));
  }
  return report.ok() && all_monotone ? 0 : 1;
}

int cmd_export(const std::string& env, const std::string& overrides, const std::string& out) {
  const auto instance = make_environment(env, parse_overrides(overrides));
  auto doc = diagram_to_json(instance.diagram->definition());
  doc["theta_star"] = instance.theta_star.values;
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    save_diagram(out, instance.diagram->definition());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence diagram bandit simulator"};
  app.require_subcommand(1);
  std::string kernels = "auto";
  app.add_option("--kernels", kernels, "E-step kernels: auto, scalar or avx2");

  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV and plot outputs");
  std::string config_path, out_dir;
  std::size_t runs = 0, horizon = 0, threads = 0;
  long long seed = -1;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--runs", runs, "Override the number of runs");
  run->add_option("--horizon", horizon, "Override the horizon");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--threads", threads, "Worker threads (default: all cores)");

  auto* omax = app.add_subcommand("omax", "Estimate O_max and the regret bound value");
  std::string env, overrides;
  std::size_t samples = 10000;
  std::uint64_t omax_seed = 1;
  double bound_n = 20000, bound_c = 1.0;
  omax->add_option("--env", env, "Environment name")->required();
  omax->add_option("--samples", samples, "Monte Carlo samples per action");
  omax->add_option("--seed", omax_seed, "Seed");
  omax->add_option("--n", bound_n, "Horizon for the bound value");
  omax->add_option("--C", bound_c, "Constant C of the bound");
  omax->add_option("--set", overrides, "Environment overrides as a JSON object");

  auto* check = app.add_subcommand("check", "Validate an environment and report monotonicity per coordinate");
  std::size_t points = 10;
  double step = 1e-3;
  check->add_option("--env", env, "Environment name")->required();
  check->add_option("--points", points, "Grid points per coordinate");
  check->add_option("--step", step, "Finite-difference step");
  check->add_option("--set", overrides, "Environment overrides as a JSON object");

  auto* exp = app.add_subcommand("export", "Print an environment's diagram file");
  std::string out;
  exp->add_option("--env", env, "Environment name")->required();
  exp->add_option("--out", out, "Write the diagram file here instead of stdout");
  exp->add_option("--set", overrides, "Environment overrides as a JSON object");

  CLI11_PARSE(app, argc, argv);
  try {
    if (!select_kernels(kernels.c_str())) throw ConfigError("kernel set '" + kernels + "' is unavailable");
    if (*run) return cmd_run(config_path, out_dir, runs, horizon, seed, threads);
    if (*omax) return cmd_omax(env, overrides, samples, omax_seed, bound_n, bound_c);
    if (*check) return cmd_check(env, overrides, points, step);
    if (*exp) return cmd_export(env, overrides, out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
