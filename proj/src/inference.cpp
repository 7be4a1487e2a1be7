#include "idbandit/inference.hpp"

#include <algorithm>
#include <cmath>

#include "idbandit/errors.hpp"

namespace idbandit {

double clamp_probability(double p) { return std::clamp(p, kLogClamp, 1.0 - kLogClamp); }

void check_enumeration_cap(const InfluenceDiagram& diagram) {
  if (diagram.stochastic_nodes().size() > kEnumerationCap)
    throw EnumerationCapError("diagram has " + std::to_string(diagram.stochastic_nodes().size()) +
                              " stochastic nodes; exact enumeration is capped at " + std::to_string(kEnumerationCap));
}

namespace {

void check_theta(const InfluenceDiagram& diagram, const ParamVector& theta) {
  if (theta.size() != diagram.param_count())
    throw ConfigError("parameter vector has " + std::to_string(theta.size()) + " entries, diagram expects " +
                      std::to_string(diagram.param_count()));
}

void check_complete(const InfluenceDiagram& diagram, const Action& a, const Assignment& assignment) {
  if (assignment.values.size() != diagram.node_count())
    throw IncompleteAssignmentError("assignment does not cover every node");
  const auto& decisions = diagram.decision_nodes();
  for (std::size_t s = 0; s < decisions.size(); ++s)
    if (assignment[decisions[s]] != a[s]) throw IncompleteAssignmentError("assignment disagrees with the action");
  for (auto v : diagram.stochastic_nodes()) {
    const int bit = assignment[v];
    if (bit != 0 && bit != 1)
      throw IncompleteAssignmentError("stochastic node '" + diagram.node(v).name + "' is unset");
  }
}

}  // namespace

Assignment sample_episode(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a, Rng& rng) {
  check_theta(diagram, theta);
  Assignment out = diagram.decisions_only(a);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto v : diagram.stochastic_topo()) {
    const double p = entry_probability(diagram.governing_entry(v, out), theta);
    out[v] = unit(rng) < p ? 1 : 0;
  }
  return out;
}

double joint_prob(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                  const Assignment& assignment) {
  check_theta(diagram, theta);
  diagram.check_action(a);
  check_complete(diagram, a, assignment);
  double prob = 1.0;
  for (auto v : diagram.stochastic_topo()) {
    const double p = entry_probability(diagram.governing_entry(v, assignment), theta);
    prob *= assignment[v] == 1 ? p : 1.0 - p;
  }
  return prob;
}

double log_joint_prob(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                      const Assignment& assignment, double eps) {
  check_theta(diagram, theta);
  diagram.check_action(a);
  check_complete(diagram, a, assignment);
  double log_prob = 0.0;
  for (auto v : diagram.stochastic_topo()) {
    const double p = std::clamp(entry_probability(diagram.governing_entry(v, assignment), theta), eps, 1.0 - eps);
    log_prob += std::log(assignment[v] == 1 ? p : 1.0 - p);
  }
  return log_prob;
}

ExpectedRewardEvaluator::ExpectedRewardEvaluator(const InfluenceDiagram& diagram, const ParamVector& theta)
    : diagram_(&diagram), theta_(&theta) {
  check_enumeration_cap(diagram);
  check_theta(diagram, theta);
  const auto& order = diagram.stochastic_topo();
  std::vector<int> pos_of(diagram.node_count(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) pos_of[order[k]] = static_cast<int>(k);

  const auto& reward = diagram.definition().reward;
  additive_ = reward.form != RewardForm::Table;
  std::vector<double> weight(diagram.node_count(), 0.0);
  if (reward.form == RewardForm::LinearSum) {
    for (std::size_t k = 0; k < reward.nodes.size(); ++k) weight[reward.nodes[k]] += reward.weights[k];
  } else if (reward.form == RewardForm::SingleNode) {
    weight[reward.nodes.front()] += reward.weights.empty() ? 1.0 : reward.weights.front();
  }
  std::vector<bool> has_children(diagram.node_count(), false);
  for (std::size_t v = 0; v < diagram.node_count(); ++v)
    for (auto p : diagram.node(v).parents) has_children[p] = true;

  const auto& stochastic = diagram.stochastic_nodes();
  nodes_.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto v = order[k];
    auto& cn = nodes_[k];
    cn.weight = weight[v];
    cn.branch = !additive_ || has_children[v];
    cn.mask_bit = static_cast<std::size_t>(std::find(stochastic.begin(), stochastic.end(), v) - stochastic.begin());
    if (auto slot = diagram.decision_slot_of(v)) {
      cn.decision_slot = static_cast<int>(*slot);
      cn.decision_offset = diagram.decision_param_offset(diagram.node(v).parents.front());
      continue;
    }
    for (auto p : diagram.node(v).parents) cn.parent_pos.push_back(static_cast<std::size_t>(pos_of[p]));
    const auto& table = diagram.node(v).table;
    cn.probs.resize(table.size());
    for (std::size_t c = 0; c < table.size(); ++c) cn.probs[c] = entry_probability(table[c], theta);
  }
}

double ExpectedRewardEvaluator::visit(std::size_t pos, double prefix, const Action& a, std::vector<int>& bits,
                                      std::uint64_t mask) const {
  if (pos == nodes_.size()) {
    if (additive_) return 0.0;
    const auto& table = diagram_->definition().reward.table;
    auto it = table.find(mask);
    return it == table.end() ? 0.0 : prefix * it->second;
  }
  const auto& cn = nodes_[pos];
  double p;
  if (cn.decision_slot >= 0) {
    p = (*theta_)[cn.decision_offset + static_cast<std::size_t>(a[static_cast<std::size_t>(cn.decision_slot)])];
  } else {
    std::size_t config = 0;
    for (std::size_t j = 0; j < cn.parent_pos.size(); ++j)
      config |= static_cast<std::size_t>(bits[cn.parent_pos[j]]) << j;
    p = cn.probs[config];
  }
  double total = additive_ ? prefix * p * cn.weight : 0.0;
  if (!cn.branch) return total + visit(pos + 1, prefix, a, bits, mask);
  if (p > 0.0) {
    bits[pos] = 1;
    total += visit(pos + 1, prefix * p, a, bits, mask | (std::uint64_t{1} << cn.mask_bit));
  }
  if (p < 1.0) {
    bits[pos] = 0;
    total += visit(pos + 1, prefix * (1.0 - p), a, bits, mask);
  }
  return total;
}

double ExpectedRewardEvaluator::operator()(const Action& a) const {
  diagram_->check_action(a);
  std::vector<int> bits(nodes_.size(), 0);
  return visit(0, 1.0, a, bits, 0);
}

double expected_reward(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a) {
  return ExpectedRewardEvaluator(diagram, theta)(a);
}

std::vector<std::size_t> de_facto_observed_set(const InfluenceDiagram& diagram, const ParamVector& theta,
                                               const Action& a, const Assignment& observed) {
  check_enumeration_cap(diagram);
  check_theta(diagram, theta);
  const auto& latents = diagram.latent_nodes();
  Assignment work = diagram.decisions_only(a);
  for (auto v : diagram.observed_nodes()) {
    const int bit = observed[v];
    if (bit != 0 && bit != 1) throw IncompleteAssignmentError("observed node '" + diagram.node(v).name + "' is unset");
    work[v] = bit;
  }
  const std::size_t configs = std::size_t{1} << latents.size();
  std::vector<double> on(latents.size(), 0.0);
  double total = 0.0;
  for (std::size_t z = 0; z < configs; ++z) {
    for (std::size_t j = 0; j < latents.size(); ++j) work[latents[j]] = static_cast<int>((z >> j) & 1u);
    double prob = 1.0;
    for (auto v : diagram.stochastic_topo()) {
      const double p = entry_probability(diagram.governing_entry(v, work), theta);
      prob *= work[v] == 1 ? p : 1.0 - p;
      if (prob == 0.0) break;
    }
    if (prob == 0.0) continue;
    total += prob;
    for (std::size_t j = 0; j < latents.size(); ++j)
      if ((z >> j) & 1u) on[j] += prob;
  }
  std::vector<std::size_t> result(diagram.observed_nodes());
  if (total > 0.0) {
    for (std::size_t j = 0; j < latents.size(); ++j) {
      const double posterior = on[j] / total;
      if (posterior <= 1e-12 || posterior >= 1.0 - 1e-12) result.push_back(latents[j]);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

Assignment mask_latents(const InfluenceDiagram& diagram, const Assignment& full) {
  Assignment out = full;
  for (auto v : diagram.latent_nodes()) out[v] = kUnset;
  return out;
}

}  // namespace idbandit
