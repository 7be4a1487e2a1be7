#pragma once

#include <cstddef>
#include <vector>

#include "idbandit/diagram.hpp"
#include "idbandit/rng.hpp"

namespace idbandit {

// Probabilities are clamped to [kLogClamp, 1 - kLogClamp] inside logarithms
// only; sampling always uses the unclamped values.
inline constexpr double kLogClamp = 1e-6;

double clamp_probability(double p);

/// Probability that the entry's node is 1.
inline double entry_probability(const TableEntry& e, const ParamVector& theta) {
  return e.learnable ? theta[e.index] : e.value;
}

/// Draws every stochastic node in topological order given the action.
Assignment sample_episode(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a, Rng& rng);

/// P(x, z | theta, a) for a complete assignment consistent with `a`.
double joint_prob(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                  const Assignment& assignment);

/// Log of joint_prob with every factor clamped to [eps, 1 - eps].
double log_joint_prob(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                      const Assignment& assignment, double eps = kLogClamp);

/// r(a, theta) = sum_{x,z} r(x, z) P(x, z | theta, a), by exact enumeration.
double expected_reward(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a);

/// Expected reward for many actions under one fixed theta.
///
/// Resolves every conditional table once, then enumerates assignments depth
/// first in topological order, skipping zero-probability branches. With
/// additive rewards, nodes without stochastic children are marginalized
/// instead of branched on.
class ExpectedRewardEvaluator {
 public:
  ExpectedRewardEvaluator(const InfluenceDiagram& diagram, const ParamVector& theta);

  double operator()(const Action& a) const;

 private:
  struct CompiledNode {
    std::vector<std::size_t> parent_pos;  // positions in topological stochastic order
    std::vector<double> probs;            // P(node = 1 | parent configuration)
    int decision_slot = -1;
    std::size_t decision_offset = 0;
    double weight = 0.0;
    bool branch = true;
    std::size_t mask_bit = 0;
  };

  double visit(std::size_t pos, double prefix, const Action& a, std::vector<int>& bits, std::uint64_t mask) const;

  const InfluenceDiagram* diagram_;
  const ParamVector* theta_;
  std::vector<CompiledNode> nodes_;
  bool additive_ = true;
};

/// Observed nodes plus every latent node whose exact posterior given the
/// observed values is 0 or 1 within 1e-12. Sorted by node id.
std::vector<std::size_t> de_facto_observed_set(const InfluenceDiagram& diagram, const ParamVector& theta,
                                               const Action& a, const Assignment& observed);

/// Copy of `full` with every latent node reset to kUnset.
Assignment mask_latents(const InfluenceDiagram& diagram, const Assignment& full);

void check_enumeration_cap(const InfluenceDiagram& diagram);

}  // namespace idbandit
