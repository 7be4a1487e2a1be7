#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "idbandit/diagram.hpp"

namespace idbandit {

inline constexpr std::size_t kPlannerCap = 1'000'000;

// Two expected rewards closer than this are treated as tied and the
// lexicographically smaller action is kept.
inline constexpr double kTieTolerance = 1e-12;

/// Number of feasible actions, saturating at kPlannerCap + 1.
std::size_t count_actions(const InfluenceDiagram& diagram);

/// Every feasible action in lexicographic order; throws PlannerCapError when
/// there are more than kPlannerCap.
std::vector<Action> enumerate_actions(const InfluenceDiagram& diagram);

struct PlanResult {
  Action action;
  double value = 0.0;
};

/// argmax_a r(a, theta) over the feasible action space.
PlanResult plan_action(const InfluenceDiagram& diagram, const ParamVector& theta);

/// Planner with the feasible action list enumerated once.
class Planner {
 public:
  explicit Planner(const InfluenceDiagram& diagram);

  PlanResult plan(const ParamVector& theta) const;
  const std::vector<Action>& actions() const { return actions_; }

 private:
  const InfluenceDiagram* diagram_;
  std::vector<Action> actions_;
};

}  // namespace idbandit
