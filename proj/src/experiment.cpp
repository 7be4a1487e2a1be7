#include "idbandit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/posterior_io.hpp"

namespace idbandit {

using nlohmann::json;

ExperimentConfig experiment_from_json(const json& doc) {
  try {
    ExperimentConfig c;
    const auto& env = doc.at("environment");
    c.environment = env.at("name").get<std::string>();
    if (env.contains("overrides")) c.overrides = env["overrides"];
    const auto& p = doc.at("policy");
    c.policy.kind = parse_policy_kind(p.at("kind").get<std::string>());
    c.policy.epsilon = p.value("epsilon", c.policy.epsilon);
    c.policy.max_sweeps = p.value("max_sweeps", c.policy.max_sweeps);
    c.policy.max_iters = p.value("max_iters", c.policy.max_iters);
    c.policy.particles = p.value("particles", c.policy.particles);
    c.policy.sigma = p.value("sigma", c.policy.sigma);
    c.policy.warm_start = p.value("warm_start", c.policy.warm_start);
    c.policy.jitter = p.value("jitter", c.policy.jitter);
    if (p.contains("prior")) c.policy.prior = posterior_from_json(p["prior"]);
    c.horizon = doc.value("horizon", c.horizon);
    c.runs = doc.value("runs", c.runs);
    c.base_seed = doc.value("base_seed", c.base_seed);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("output")) {
      const auto& o = doc["output"];
      c.out_dir = o.value("dir", c.out_dir);
      c.plot = o.value("plot", c.plot);
      c.snapshots = o.value("snapshots", c.snapshots);
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

json experiment_to_json(const ExperimentConfig& c) {
  json policy{{"kind", to_string(c.policy.kind)},   {"epsilon", c.policy.epsilon},
              {"max_sweeps", c.policy.max_sweeps},  {"max_iters", c.policy.max_iters},
              {"particles", c.policy.particles},    {"sigma", c.policy.sigma},
              {"warm_start", c.policy.warm_start},  {"jitter", c.policy.jitter}};
  if (c.policy.prior) policy["prior"] = posterior_to_json(*c.policy.prior);
  return json{{"environment", {{"name", c.environment}, {"overrides", c.overrides}}},
              {"policy", policy},
              {"horizon", c.horizon},
              {"runs", c.runs},
              {"base_seed", c.base_seed},
              {"threads", c.threads},
              {"output", {{"dir", c.out_dir}, {"plot", c.plot}, {"snapshots", c.snapshots}}}};
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse experiment config " + path + ": " + e.what());
  }
  return experiment_from_json(doc);
}

void validate_experiment(const ExperimentConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.runs < 1) throw ConfigError("runs must be at least 1");
  const auto instance = make_environment(c.environment, c.overrides);
  make_policy(c.policy, instance.diagram);
}

RunResult run_once(const BanditInstance& instance, const PolicyConfig& policy_config, std::size_t horizon,
                   std::uint64_t base_seed, std::size_t run) {
  const InfluenceDiagram& diagram = *instance.diagram;
  auto policy = make_policy(policy_config, instance.diagram);
  Rng env_rng = make_rng(base_seed, run, Stream::Environment);
  Rng policy_rng = make_rng(base_seed, run, Stream::Policy);
  const ExpectedRewardEvaluator true_reward(diagram, instance.theta_star);

  RunResult out;
  out.run = run;
  out.rewards.reserve(horizon);
  out.regrets.reserve(horizon);
  out.actions.reserve(horizon);
  using clock = std::chrono::steady_clock;
  clock::duration busy{};
  for (std::size_t t = 1; t <= horizon; ++t) {
    auto start = clock::now();
    const Action a = policy->act(t, policy_rng);
    busy += clock::now() - start;

    const Assignment full = sample_episode(diagram, instance.theta_star, a, env_rng);
    const Assignment observed = mask_latents(diagram, full);

    start = clock::now();
    policy->update(a, observed, policy->feedback_relaxed() ? &full : nullptr, policy_rng);
    busy += clock::now() - start;

    out.rewards.push_back(diagram.reward(full));
    double regret = instance.optimal_value - true_reward(a);
    if (regret < 0.0 && regret > -1e-12) regret = 0.0;
    out.regrets.push_back(regret);
    out.actions.push_back(a);
  }
  out.seconds = std::chrono::duration<double>(busy).count();
  out.snapshot = policy->snapshot();
  return out;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  if (config.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (config.runs < 1) throw ConfigError("runs must be at least 1");
  const auto instance = make_environment(config.environment, config.overrides);
  make_policy(config.policy, instance.diagram);  // surfaces policy errors before any run

  std::vector<RunResult> results(config.runs);
  std::size_t workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.runs) return;
      try {
        results[r] = run_once(instance, config.policy, config.horizon, config.base_seed, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(config.runs);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<double> average_cumulative_reward(const std::vector<double>& rewards) {
  if (rewards.empty()) throw ConfigError("average cumulative reward needs at least one reward");
  std::vector<double> out(rewards.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    sum += rewards[t];
    out[t] = sum / static_cast<double>(t + 1);
  }
  return out;
}

std::vector<double> cumulative_regret(const RunResult& run) {
  std::vector<double> out(run.regrets.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < run.regrets.size(); ++t) {
    sum += run.regrets[t];
    out[t] = sum;
  }
  return out;
}

}  // namespace idbandit
