#include "idbandit/planner.hpp"

#include <algorithm>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"

namespace idbandit {

namespace {

std::vector<std::size_t> domain_sizes(const InfluenceDiagram& diagram) {
  std::vector<std::size_t> sizes;
  for (auto v : diagram.decision_nodes()) sizes.push_back(diagram.domain_size(v));
  return sizes;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  constexpr std::size_t limit = kPlannerCap + 1;
  if (a == 0 || b == 0) return 0;
  if (a > limit / b) return limit;
  return std::min(a * b, limit);
}

// n choose k, saturating
std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > static_cast<double>(kPlannerCap)) return kPlannerCap + 1;
  }
  return static_cast<std::size_t>(c + 0.5);
}

void extend(const std::vector<std::size_t>& sizes, bool distinct, bool increasing, Action& prefix,
            std::vector<bool>& used, std::vector<Action>& out) {
  const std::size_t slot = prefix.size();
  if (slot == sizes.size()) {
    out.push_back(prefix);
    return;
  }
  const int start = increasing && slot > 0 ? prefix.back() + 1 : 0;
  for (int v = start; v < static_cast<int>(sizes[slot]); ++v) {
    if (distinct && used[static_cast<std::size_t>(v)]) continue;
    prefix.push_back(v);
    if (distinct) used[static_cast<std::size_t>(v)] = true;
    extend(sizes, distinct, increasing, prefix, used, out);
    if (distinct) used[static_cast<std::size_t>(v)] = false;
    prefix.pop_back();
  }
}

}  // namespace

std::size_t count_actions(const InfluenceDiagram& diagram) {
  const auto sizes = domain_sizes(diagram);
  const auto& space = diagram.definition().action_space;
  if (sizes.empty()) return 1;
  if (!space.distinct_required) {
    std::size_t n = 1;
    for (auto s : sizes) n = saturating_mul(n, s);
    return n;
  }
  const std::size_t universe = sizes.front();
  const std::size_t k = sizes.size();
  if (space.order == ActionOrder::Unordered) return choose(universe, k);
  std::size_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n = saturating_mul(n, universe >= i ? universe - i : 0);
  return n;
}

std::vector<Action> enumerate_actions(const InfluenceDiagram& diagram) {
  const std::size_t n = count_actions(diagram);
  if (n > kPlannerCap)
    throw PlannerCapError("action space exceeds the planner cap of " + std::to_string(kPlannerCap) + " actions");
  const auto sizes = domain_sizes(diagram);
  const auto& space = diagram.definition().action_space;
  std::vector<Action> out;
  out.reserve(n);
  Action prefix;
  std::vector<bool> used(sizes.empty() ? 0 : sizes.front(), false);
  const bool increasing = space.distinct_required && space.order == ActionOrder::Unordered;
  extend(sizes, space.distinct_required && !increasing, increasing, prefix, used, out);
  return out;
}

Planner::Planner(const InfluenceDiagram& diagram) : diagram_(&diagram), actions_(enumerate_actions(diagram)) {}

PlanResult Planner::plan(const ParamVector& theta) const {
  const ExpectedRewardEvaluator evaluate(*diagram_, theta);
  PlanResult best;
  bool first = true;
  for (const auto& a : actions_) {
    const double value = evaluate(a);
    if (first || value > best.value + kTieTolerance) {
      best.action = a;
      best.value = value;
      first = false;
    }
  }
  return best;
}

PlanResult plan_action(const InfluenceDiagram& diagram, const ParamVector& theta) {
  return Planner(diagram).plan(theta);
}

}  // namespace idbandit
