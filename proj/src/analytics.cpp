#include "idbandit/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/planner.hpp"

namespace idbandit {

std::size_t observed_parameter_count(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                                     const Assignment& full) {
  std::vector<bool> resolved(diagram.node_count(), false);
  for (auto v : diagram.decision_nodes()) resolved[v] = true;
  if (diagram.has_latents()) {
    for (auto v : de_facto_observed_set(diagram, theta, a, full)) resolved[v] = true;
  } else {
    for (auto v : diagram.observed_nodes()) resolved[v] = true;
  }
  std::size_t count = 0;
  for (auto v : diagram.stochastic_nodes()) {
    if (!resolved[v]) continue;
    const auto& parents = diagram.node(v).parents;
    if (!std::all_of(parents.begin(), parents.end(), [&](std::size_t p) { return resolved[p]; })) continue;
    if (diagram.governing_entry(v, full).learnable) ++count;
  }
  return count;
}

OMaxEstimate estimate_o_max(const BanditInstance& instance, const BetaState& prior, std::size_t num_samples, Rng& rng) {
  if (num_samples == 0) throw ConfigError("O_max estimation needs at least one sample");
  const InfluenceDiagram& diagram = *instance.diagram;
  if (prior.size() != diagram.param_count()) throw ConfigError("prior size does not match the diagram");
  OMaxEstimate out;
  bool first = true;
  for (const auto& a : enumerate_actions(diagram)) {
    double total = 0.0;
    for (std::size_t s = 0; s < num_samples; ++s) {
      const ParamVector theta = sample_theta(prior, rng);
      const Assignment full = sample_episode(diagram, theta, a, rng);
      total += static_cast<double>(observed_parameter_count(diagram, theta, a, full));
    }
    const double mean = total / static_cast<double>(num_samples);
    out.per_action.push_back(mean);
    if (first || mean > out.value) {
      out.value = mean;
      out.argmax = a;
      first = false;
    }
  }
  return out;
}

double bound_value(double C, std::size_t L_total, std::size_t d, double o_max, double n, double B) {
  const double params = static_cast<double>(d + L_total);
  const double log_n = std::log(n);
  return C * std::sqrt(6.0 * params * o_max * n * log_n * (1.0 + log_n)) +
         (C + 2.0 * std::numbers::pi * std::numbers::pi / 3.0 * B) * params;
}

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Violated: return "violated";
  }
  return "violated";
}

std::vector<double> monotonicity_grid(std::size_t points, double step) {
  std::vector<double> grid(points);
  const double top = 1.0 - step;
  for (std::size_t j = 0; j < points; ++j)
    grid[j] = points == 1 ? 0.0 : top * static_cast<double>(j) / static_cast<double>(points - 1);
  return grid;
}

Monotonicity check_monotonicity(const BanditInstance& instance, const ParamVector& theta, std::size_t coordinate,
                                const std::vector<double>& grid, double step) {
  const InfluenceDiagram& diagram = *instance.diagram;
  if (coordinate >= diagram.param_count()) throw ConfigError("coordinate is outside the parameter vector");
  const auto actions = enumerate_actions(diagram);
  bool up = false;
  bool down = false;
  for (double g : grid) {
    ParamVector lo = theta;
    ParamVector hi = theta;
    lo[coordinate] = g;
    hi[coordinate] = std::min(1.0, g + step);
    const ExpectedRewardEvaluator r_lo(diagram, lo);
    const ExpectedRewardEvaluator r_hi(diagram, hi);
    for (const auto& a : actions) {
      const double diff = r_hi(a) - r_lo(a);
      if (diff > 1e-12) up = true;
      if (diff < -1e-12) down = true;
    }
  }
  if (up && down) return Monotonicity::Violated;
  return down ? Monotonicity::Decreasing : Monotonicity::Increasing;
}

}  // namespace idbandit
