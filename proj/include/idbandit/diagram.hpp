#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace idbandit {

// Exact enumeration (joint sums, expected reward, posteriors over latents) is
// refused beyond this many stochastic nodes.
inline constexpr std::size_t kEnumerationCap = 20;

inline constexpr int kUnset = -1;

enum class NodeKind { Decision, Latent, Observed };

const char* to_string(NodeKind kind);

/// One entry of a conditional probability table: either a fixed probability
/// or a reference into the learnable parameter vector.
struct TableEntry {
  bool learnable = false;
  std::size_t index = 0;  // learnable only
  double value = 0.0;     // known only

  static TableEntry known(double p) { return {false, 0, p}; }
  static TableEntry param(std::size_t i) { return {true, i, 0.0}; }

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// A set of values a decision node can take. Decision nodes naming the same
/// domain share its block of Bernoulli means.
struct DecisionDomain {
  std::string name;
  std::size_t size = 0;
  std::size_t offset = 0;  // first parameter index of the block
};

/// Node definition as written in a diagram file.
///
/// Parent configurations of a stochastic node with parents (p_0, ..., p_{k-1})
/// are indexed by sum_j value(p_j) << j, so `table` has 2^k entries. Children
/// of decision nodes have no table; their mean is selected by the decision.
struct NodeDefinition {
  std::string name;
  NodeKind kind = NodeKind::Latent;
  std::vector<std::size_t> parents;
  std::string domain;
  std::vector<TableEntry> table;
};

enum class RewardForm { LinearSum, SingleNode, Table };

/// Deterministic reward r(x, z).
///
/// Table keys are bit masks over the stochastic nodes in node-id order (bit j
/// is the value of the j-th stochastic node); missing keys have reward 0.
struct RewardDefinition {
  RewardForm form = RewardForm::LinearSum;
  std::vector<std::size_t> nodes;
  std::vector<double> weights;
  std::map<std::uint64_t, double> table;
};

enum class ActionOrder { Ordered, Unordered };

struct ActionSpaceDefinition {
  std::vector<std::size_t> decision_nodes;
  bool distinct_required = false;
  // Only meaningful with distinct_required: unordered lists are enumerated as
  // strictly increasing tuples.
  ActionOrder order = ActionOrder::Ordered;
};

struct DiagramDefinition {
  std::vector<DecisionDomain> domains;
  std::vector<NodeDefinition> nodes;
  RewardDefinition reward;
  ActionSpaceDefinition action_space;
  std::optional<double> reward_bound;
};

struct Violation {
  std::string code;
  std::vector<std::size_t> nodes;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& code) const;
  std::string summary() const;
};

ValidationReport validate_diagram(const DiagramDefinition& def);

/// A decision tuple, one value per decision node in action-space order.
using Action = std::vector<int>;

struct ParamVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Values of every node, indexed by node id. Decision nodes hold their chosen
/// value, stochastic nodes hold 0 or 1; kUnset marks an unobserved node.
struct Assignment {
  std::vector<int> values;

  int operator[](std::size_t i) const { return values[i]; }
  int& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// What parameter `index` parameterizes: a (node, parent configuration) slot
/// or a (decision domain, value) slot.
struct ParamOwner {
  bool decision = false;
  std::size_t node = 0;    // table slot
  std::size_t config = 0;  // table slot
  std::size_t domain = 0;  // decision slot
  std::size_t value = 0;   // decision slot
};

/// Validated, immutable influence diagram.
class InfluenceDiagram {
 public:
  /// Validates and throws ConfigError listing every violation.
  static InfluenceDiagram build(DiagramDefinition def);

  const DiagramDefinition& definition() const { return def_; }
  std::size_t node_count() const { return def_.nodes.size(); }
  const NodeDefinition& node(std::size_t id) const { return def_.nodes[id]; }
  NodeKind kind(std::size_t id) const { return def_.nodes[id].kind; }
  std::optional<std::size_t> find_node(const std::string& name) const;

  const std::vector<std::size_t>& topo_order() const { return topo_; }
  /// Stochastic nodes in topological order.
  const std::vector<std::size_t>& stochastic_topo() const { return stochastic_topo_; }
  /// Node-id ordered lists.
  const std::vector<std::size_t>& stochastic_nodes() const { return stochastic_; }
  const std::vector<std::size_t>& latent_nodes() const { return latent_; }
  const std::vector<std::size_t>& observed_nodes() const { return observed_; }
  const std::vector<std::size_t>& decision_nodes() const { return def_.action_space.decision_nodes; }

  std::size_t d() const { return d_; }
  std::size_t decision_param_count() const { return l_total_; }
  std::size_t param_count() const { return d_ + l_total_; }
  const ParamOwner& param_owner(std::size_t index) const { return owners_[index]; }

  /// Position in the action tuple of the decision parent of `child`, if any.
  std::optional<std::size_t> decision_slot_of(std::size_t child) const;
  std::size_t decision_param_offset(std::size_t decision_node) const;
  std::size_t domain_size(std::size_t decision_node) const;
  std::size_t domain_index(std::size_t decision_node) const;

  /// Parent configuration index of `node` under `values`.
  std::size_t parent_config(std::size_t node, const Assignment& values) const;

  /// Entry governing `node` under the realized parent configuration; for
  /// children of decision nodes this is the decision parameter they select.
  TableEntry governing_entry(std::size_t node, const Assignment& values) const;

  double reward(const Assignment& values) const;
  /// Upper bound B on r(x, z); the maximum over assignments unless given.
  double reward_bound() const { return reward_bound_; }

  bool has_latents() const { return !latent_.empty(); }

  /// Throws InvalidActionError when `a` is outside the action space.
  void check_action(const Action& a) const;
  Assignment decisions_only(const Action& a) const;

  /// Bit mask over stochastic nodes (node-id order) for Table rewards.
  std::uint64_t stochastic_mask(const Assignment& values) const;

 private:
  explicit InfluenceDiagram(DiagramDefinition def);

  DiagramDefinition def_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> stochastic_topo_;
  std::vector<std::size_t> stochastic_;
  std::vector<std::size_t> latent_;
  std::vector<std::size_t> observed_;
  std::vector<int> decision_slot_;   // per node: slot of decision parent or -1
  std::vector<int> node_domain_;     // per decision node: domain index or -1
  std::vector<int> stochastic_rank_; // per node: position in stochastic_ or -1
  std::vector<ParamOwner> owners_;
  std::size_t d_ = 0;
  std::size_t l_total_ = 0;
  double reward_bound_ = 0.0;
};

ValidationReport validate_diagram(const InfluenceDiagram& diagram);

}  // namespace idbandit
