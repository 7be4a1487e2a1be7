#include "idbandit/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "idbandit/errors.hpp"

namespace idbandit {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Decision: return "decision";
    case NodeKind::Latent: return "latent";
    case NodeKind::Observed: return "observed";
  }
  return "?";
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << v.code << ": " << v.message;
    if (!v.nodes.empty()) {
      out << " (nodes";
      for (auto n : v.nodes) out << ' ' << n;
      out << ')';
    }
    out << '\n';
  }
  return out.str();
}

namespace {

bool is_stochastic(NodeKind k) { return k != NodeKind::Decision; }

class Reporter {
 public:
  explicit Reporter(ValidationReport& report) : report_(report) {}
  void add(std::string code, std::vector<std::size_t> nodes, std::string message) {
    report_.violations.push_back({std::move(code), std::move(nodes), std::move(message)});
  }

 private:
  ValidationReport& report_;
};

// Kahn's algorithm; returns the nodes left over when a cycle exists.
std::vector<std::size_t> topological_sort(const DiagramDefinition& def, std::vector<std::size_t>& order) {
  const std::size_t n = def.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto p : def.nodes[v].parents) {
      if (p >= n) continue;
      ++indegree[v];
      children[p].push_back(v);
    }
  }
  // Smallest id first keeps the order deterministic.
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.insert(v);
  order.clear();
  while (!ready.empty()) {
    const auto v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto c : children[v])
      if (--indegree[c] == 0) ready.insert(c);
  }
  std::vector<std::size_t> remaining;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] > 0) remaining.push_back(v);
  return remaining;
}

double computed_reward_bound(const DiagramDefinition& def) {
  const auto& r = def.reward;
  switch (r.form) {
    case RewardForm::LinearSum: {
      double b = 0.0;
      for (double w : r.weights) b += std::max(w, 0.0);
      return b;
    }
    case RewardForm::SingleNode:
      return r.weights.empty() ? 1.0 : std::max(r.weights.front(), 0.0);
    case RewardForm::Table: {
      double b = 0.0;
      for (const auto& [mask, value] : r.table) b = std::max(b, value);
      return b;
    }
  }
  return 0.0;
}

}  // namespace

ValidationReport validate_diagram(const DiagramDefinition& def) {
  ValidationReport report;
  Reporter rep(report);
  const std::size_t n = def.nodes.size();

  std::set<std::string> names;
  for (std::size_t v = 0; v < n; ++v) {
    if (!names.insert(def.nodes[v].name).second)
      rep.add("duplicate-name", {v}, "node name '" + def.nodes[v].name + "' is used twice");
  }

  std::vector<std::vector<std::size_t>> children(n);
  bool parents_ok = true;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& node = def.nodes[v];
    std::set<std::size_t> seen;
    for (auto p : node.parents) {
      if (p >= n) {
        rep.add("unknown-parent", {v}, "parent index " + std::to_string(p) + " does not exist");
        parents_ok = false;
        continue;
      }
      if (p == v) {
        rep.add("not-a-dag", {v}, "node is its own parent");
        parents_ok = false;
      }
      if (!seen.insert(p).second) rep.add("duplicate-parent", {v, p}, "parent listed twice");
      children[p].push_back(v);
    }
  }

  std::vector<std::size_t> order;
  auto cyclic = topological_sort(def, order);
  if (!cyclic.empty() && parents_ok) rep.add("not-a-dag", cyclic, "graph contains a directed cycle");

  std::map<std::string, std::size_t> domain_by_name;
  for (std::size_t i = 0; i < def.domains.size(); ++i) {
    const auto& dom = def.domains[i];
    if (dom.size == 0) rep.add("empty-domain", {}, "decision domain '" + dom.name + "' has no values");
    if (!domain_by_name.emplace(dom.name, i).second)
      rep.add("duplicate-domain", {}, "decision domain '" + dom.name + "' declared twice");
  }

  // Parameter bookkeeping: learnable table entries form the first d indices,
  // decision domains tile the trailing block.
  std::map<std::size_t, std::size_t> table_index_uses;
  std::vector<std::size_t> decisions;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& node = def.nodes[v];
    if (node.kind == NodeKind::Decision) {
      decisions.push_back(v);
      if (!node.parents.empty()) rep.add("decision-has-parents", {v}, "decision nodes cannot have parents");
      if (!domain_by_name.count(node.domain))
        rep.add("unknown-domain", {v}, "decision domain '" + node.domain + "' is not declared");
      if (!node.table.empty()) rep.add("decision-has-table", {v}, "decision nodes carry no probability table");
      if (children[v].size() != 1) {
        rep.add("decision-child-count", {v},
                "decision node has " + std::to_string(children[v].size()) + " children, expected 1");
      } else {
        const auto c = children[v].front();
        if (def.nodes[c].kind == NodeKind::Decision)
          rep.add("decision-child-kind", {v, c}, "child of a decision node must be stochastic");
        if (def.nodes[c].parents.size() != 1)
          rep.add("decision-child-parents", {v, c},
                  "child of a decision node has " + std::to_string(def.nodes[c].parents.size()) +
                      " parents, expected 1");
      }
      continue;
    }
    const bool decision_child =
        node.parents.size() == 1 && node.parents.front() < n &&
        def.nodes[node.parents.front()].kind == NodeKind::Decision;
    if (decision_child) {
      if (!node.table.empty())
        rep.add("decision-child-table", {v}, "mean of a decision child is selected by the decision");
      continue;
    }
    for (auto p : node.parents) {
      if (p < n && def.nodes[p].kind == NodeKind::Decision && node.parents.size() != 1)
        rep.add("decision-child-parents", {p, v}, "child of a decision node must have a single parent");
    }
    if (node.parents.size() > kEnumerationCap) {
      rep.add("too-many-parents", {v}, "node has more parents than the enumeration cap");
      continue;
    }
    const std::size_t expected = std::size_t{1} << node.parents.size();
    if (node.table.size() != expected) {
      rep.add("table-size", {v},
              "table has " + std::to_string(node.table.size()) + " entries, expected " + std::to_string(expected));
    }
    for (std::size_t c = 0; c < node.table.size(); ++c) {
      const auto& e = node.table[c];
      if (e.learnable) {
        ++table_index_uses[e.index];
      } else if (!(e.value >= 0.0 && e.value <= 1.0)) {
        rep.add("probability-range", {v}, "known probability outside [0, 1] at configuration " + std::to_string(c));
      }
    }
  }

  const std::size_t d = table_index_uses.size();
  for (const auto& [index, uses] : table_index_uses) {
    if (uses > 1)
      rep.add("param-duplicate", {}, "parameter " + std::to_string(index) + " is referenced by " +
                                         std::to_string(uses) + " slots");
    if (index >= d)
      rep.add("param-gap", {}, "table parameter " + std::to_string(index) + " lies outside [0, " +
                                   std::to_string(d) + ")");
  }
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (const auto& dom : def.domains) blocks.emplace_back(dom.offset, dom.size);
  std::sort(blocks.begin(), blocks.end());
  std::size_t cursor = d;
  for (const auto& [offset, size] : blocks) {
    if (offset != cursor) {
      rep.add("param-gap", {}, "decision parameters must tile the block after the d table parameters; expected offset " +
                                   std::to_string(cursor) + ", found " + std::to_string(offset));
    }
    cursor = std::max(cursor, offset + size);
  }

  std::vector<bool> is_stoch(n, false);
  std::size_t stochastic_count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (is_stochastic(def.nodes[v].kind)) {
      is_stoch[v] = true;
      ++stochastic_count;
    }
  }
  const auto& reward = def.reward;
  if (reward.form == RewardForm::LinearSum || reward.form == RewardForm::SingleNode) {
    if (reward.nodes.empty()) rep.add("reward-empty", {}, "reward references no nodes");
    if (reward.form == RewardForm::SingleNode && reward.nodes.size() != 1)
      rep.add("reward-arity", {}, "single-node reward must reference exactly one node");
    if (reward.form == RewardForm::LinearSum && reward.weights.size() != reward.nodes.size())
      rep.add("reward-arity", {}, "linear reward needs one weight per node");
    for (auto v : reward.nodes) {
      if (v >= n || !is_stoch[v]) rep.add("reward-node", {v}, "reward references a non-stochastic or unknown node");
    }
    for (double w : reward.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) rep.add("reward-range", {}, "reward weights must be finite and nonnegative");
    }
  } else {
    for (const auto& [mask, value] : reward.table) {
      if (stochastic_count < 64 && (mask >> stochastic_count) != 0)
        rep.add("reward-node", {}, "reward table key references more stochastic nodes than exist");
      if (!(value >= 0.0) || !std::isfinite(value)) rep.add("reward-range", {}, "reward table values must be nonnegative");
    }
  }
  if (def.reward_bound) {
    if (*def.reward_bound < computed_reward_bound(def))
      rep.add("reward-range", {}, "declared reward bound is below the maximum reward");
  }

  const auto& space = def.action_space;
  {
    std::vector<std::size_t> listed = space.decision_nodes;
    std::sort(listed.begin(), listed.end());
    if (listed != decisions)
      rep.add("action-space", listed, "action space must list every decision node exactly once");
    if (space.distinct_required && !space.decision_nodes.empty()) {
      std::set<std::string> doms;
      for (auto v : space.decision_nodes)
        if (v < n) doms.insert(def.nodes[v].domain);
      if (doms.size() != 1) {
        rep.add("action-space", {}, "distinct lists require one shared domain");
      } else if (auto it = domain_by_name.find(*doms.begin()); it != domain_by_name.end()) {
        if (space.decision_nodes.size() > def.domains[it->second].size)
          rep.add("action-space", {}, "list length exceeds the number of distinct items");
      }
    }
  }
  return report;
}

InfluenceDiagram InfluenceDiagram::build(DiagramDefinition def) {
  auto report = validate_diagram(def);
  if (!report.ok()) throw ConfigError("invalid influence diagram:\n" + report.summary());
  return InfluenceDiagram(std::move(def));
}

InfluenceDiagram::InfluenceDiagram(DiagramDefinition def) : def_(std::move(def)) {
  const std::size_t n = def_.nodes.size();
  topological_sort(def_, topo_);
  stochastic_rank_.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    switch (def_.nodes[v].kind) {
      case NodeKind::Decision: break;
      case NodeKind::Latent: latent_.push_back(v); break;
      case NodeKind::Observed: observed_.push_back(v); break;
    }
    if (def_.nodes[v].kind != NodeKind::Decision) {
      stochastic_rank_[v] = static_cast<int>(stochastic_.size());
      stochastic_.push_back(v);
    }
  }
  for (auto v : topo_)
    if (def_.nodes[v].kind != NodeKind::Decision) stochastic_topo_.push_back(v);

  node_domain_.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (def_.nodes[v].kind != NodeKind::Decision) continue;
    for (std::size_t i = 0; i < def_.domains.size(); ++i)
      if (def_.domains[i].name == def_.nodes[v].domain) node_domain_[v] = static_cast<int>(i);
  }
  decision_slot_.assign(n, -1);
  const auto& decisions = def_.action_space.decision_nodes;
  for (std::size_t s = 0; s < decisions.size(); ++s) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto& node = def_.nodes[v];
      if (node.kind != NodeKind::Decision && node.parents.size() == 1 && node.parents.front() == decisions[s])
        decision_slot_[v] = static_cast<int>(s);
    }
  }

  for (const auto& node : def_.nodes)
    for (const auto& e : node.table)
      if (e.learnable) ++d_;
  for (const auto& dom : def_.domains) l_total_ += dom.size;
  owners_.resize(d_ + l_total_);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& table = def_.nodes[v].table;
    for (std::size_t c = 0; c < table.size(); ++c)
      if (table[c].learnable) owners_[table[c].index] = ParamOwner{false, v, c, 0, 0};
  }
  for (std::size_t i = 0; i < def_.domains.size(); ++i) {
    const auto& dom = def_.domains[i];
    for (std::size_t a = 0; a < dom.size; ++a) owners_[dom.offset + a] = ParamOwner{true, 0, 0, i, a};
  }
  reward_bound_ = def_.reward_bound ? *def_.reward_bound : computed_reward_bound(def_);
}

std::optional<std::size_t> InfluenceDiagram::find_node(const std::string& name) const {
  for (std::size_t v = 0; v < def_.nodes.size(); ++v)
    if (def_.nodes[v].name == name) return v;
  return std::nullopt;
}

std::optional<std::size_t> InfluenceDiagram::decision_slot_of(std::size_t child) const {
  if (decision_slot_[child] < 0) return std::nullopt;
  return static_cast<std::size_t>(decision_slot_[child]);
}

std::size_t InfluenceDiagram::domain_index(std::size_t decision_node) const {
  return static_cast<std::size_t>(node_domain_[decision_node]);
}

std::size_t InfluenceDiagram::decision_param_offset(std::size_t decision_node) const {
  return def_.domains[domain_index(decision_node)].offset;
}

std::size_t InfluenceDiagram::domain_size(std::size_t decision_node) const {
  return def_.domains[domain_index(decision_node)].size;
}

std::size_t InfluenceDiagram::parent_config(std::size_t node, const Assignment& values) const {
  std::size_t config = 0;
  const auto& parents = def_.nodes[node].parents;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    const int bit = values[parents[j]];
    if (bit != 0 && bit != 1) throw IncompleteAssignmentError("parent of node '" + def_.nodes[node].name + "' is unset");
    config |= static_cast<std::size_t>(bit) << j;
  }
  return config;
}

TableEntry InfluenceDiagram::governing_entry(std::size_t node, const Assignment& values) const {
  if (decision_slot_[node] >= 0) {
    const auto decision = def_.nodes[node].parents.front();
    const int a = values[decision];
    if (a < 0 || static_cast<std::size_t>(a) >= domain_size(decision))
      throw InvalidActionError("decision '" + def_.nodes[decision].name + "' is unset or out of range");
    return TableEntry::param(decision_param_offset(decision) + static_cast<std::size_t>(a));
  }
  return def_.nodes[node].table[parent_config(node, values)];
}

std::uint64_t InfluenceDiagram::stochastic_mask(const Assignment& values) const {
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < stochastic_.size(); ++j)
    if (values[stochastic_[j]] == 1) mask |= std::uint64_t{1} << j;
  return mask;
}

double InfluenceDiagram::reward(const Assignment& values) const {
  const auto& r = def_.reward;
  switch (r.form) {
    case RewardForm::LinearSum: {
      double total = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k)
        if (values[r.nodes[k]] == 1) total += r.weights[k];
      return total;
    }
    case RewardForm::SingleNode:
      return values[r.nodes.front()] == 1 ? (r.weights.empty() ? 1.0 : r.weights.front()) : 0.0;
    case RewardForm::Table: {
      auto it = r.table.find(stochastic_mask(values));
      return it == r.table.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

void InfluenceDiagram::check_action(const Action& a) const {
  const auto& space = def_.action_space;
  if (a.size() != space.decision_nodes.size())
    throw InvalidActionError("action has " + std::to_string(a.size()) + " decisions, expected " +
                             std::to_string(space.decision_nodes.size()));
  for (std::size_t s = 0; s < a.size(); ++s) {
    const auto size = domain_size(space.decision_nodes[s]);
    if (a[s] < 0 || static_cast<std::size_t>(a[s]) >= size)
      throw InvalidActionError("decision " + std::to_string(s) + " value " + std::to_string(a[s]) +
                               " is outside its domain of size " + std::to_string(size));
  }
  if (space.distinct_required) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (a[i] == a[j]) throw InvalidActionError("action repeats item " + std::to_string(a[i]));
  }
}

Assignment InfluenceDiagram::decisions_only(const Action& a) const {
  check_action(a);
  Assignment out{std::vector<int>(def_.nodes.size(), kUnset)};
  const auto& decisions = def_.action_space.decision_nodes;
  for (std::size_t s = 0; s < a.size(); ++s) out[decisions[s]] = a[s];
  return out;
}

ValidationReport validate_diagram(const InfluenceDiagram& diagram) { return validate_diagram(diagram.definition()); }

}  // namespace idbandit
