#pragma once

// Helpers shared by the test executables. The oracles here recompute
// probabilities, rewards and action spaces straight from the diagram
// definition so they do not share code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "idbandit/diagram.hpp"
#include "idbandit/rng.hpp"

namespace testing {

using namespace idbandit;

inline NodeDefinition decision_node(const std::string& name, const std::string& domain) {
  NodeDefinition n;
  n.name = name;
  n.kind = NodeKind::Decision;
  n.domain = domain;
  return n;
}

inline NodeDefinition chance_node(const std::string& name, NodeKind kind, std::vector<std::size_t> parents,
                                  std::vector<TableEntry> table = {}) {
  NodeDefinition n;
  n.name = name;
  n.kind = kind;
  n.parents = std::move(parents);
  n.table = std::move(table);
  return n;
}

inline std::vector<TableEntry> fixed(std::initializer_list<double> values) {
  std::vector<TableEntry> t;
  for (double v : values) t.push_back(TableEntry::known(v));
  return t;
}

// Decisions A1, A2 over one shared domain of L items, latent children Z1, Z2
// and an observed X whose four-entry table is learnable.
inline DiagramDefinition two_slot_example(std::size_t L) {
  DiagramDefinition def;
  def.domains.push_back({"items", L, 4});
  def.nodes.push_back(decision_node("A1", "items"));
  def.nodes.push_back(decision_node("A2", "items"));
  def.nodes.push_back(chance_node("Z1", NodeKind::Latent, {0}));
  def.nodes.push_back(chance_node("Z2", NodeKind::Latent, {1}));
  def.nodes.push_back(chance_node("X", NodeKind::Observed, {2, 3},
                                  {TableEntry::param(0), TableEntry::param(1), TableEntry::param(2),
                                   TableEntry::param(3)}));
  def.reward.form = RewardForm::SingleNode;
  def.reward.nodes = {4};
  def.reward.weights = {1.0};
  def.action_space.decision_nodes = {0, 1};
  return def;
}

inline ParamVector random_theta(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ParamVector t;
  t.values.resize(n);
  for (auto& v : t.values) v = u(gen);
  return t;
}

// Probability P(node = 1) under full `values`, read from the definition.
inline double oracle_node_prob(const DiagramDefinition& def, std::size_t v, const std::vector<int>& values,
                               const ParamVector& theta) {
  const NodeDefinition& node = def.nodes[v];
  if (node.parents.size() == 1 && def.nodes[node.parents[0]].kind == NodeKind::Decision) {
    const NodeDefinition& dec = def.nodes[node.parents[0]];
    for (const auto& dom : def.domains)
      if (dom.name == dec.domain) return theta[dom.offset + static_cast<std::size_t>(values[node.parents[0]])];
  }
  std::size_t config = 0;
  for (std::size_t j = 0; j < node.parents.size(); ++j)
    config |= static_cast<std::size_t>(values[node.parents[j]]) << j;
  const TableEntry& e = node.table[config];
  return e.learnable ? theta[e.index] : e.value;
}

inline double oracle_joint(const DiagramDefinition& def, const std::vector<int>& values, const ParamVector& theta) {
  double p = 1.0;
  for (std::size_t v = 0; v < def.nodes.size(); ++v) {
    if (def.nodes[v].kind == NodeKind::Decision) continue;
    const double q = oracle_node_prob(def, v, values, theta);
    p *= values[v] == 1 ? q : 1.0 - q;
  }
  return p;
}

inline double oracle_reward(const DiagramDefinition& def, const std::vector<int>& values) {
  const RewardDefinition& r = def.reward;
  switch (r.form) {
    case RewardForm::LinearSum: {
      double s = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * values[r.nodes[k]];
      return s;
    }
    case RewardForm::SingleNode:
      return values[r.nodes[0]];
    case RewardForm::Table: {
      std::uint64_t mask = 0;
      std::size_t bit = 0;
      for (std::size_t v = 0; v < def.nodes.size(); ++v) {
        if (def.nodes[v].kind == NodeKind::Decision) continue;
        if (values[v] == 1) mask |= std::uint64_t{1} << bit;
        ++bit;
      }
      auto it = r.table.find(mask);
      return it == r.table.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

// Calls f(values) for every assignment of the stochastic nodes with the
// decisions fixed to `a`.
template <class F>
void for_each_assignment(const DiagramDefinition& def, const Action& a, F&& f) {
  std::vector<std::size_t> chance;
  for (std::size_t v = 0; v < def.nodes.size(); ++v)
    if (def.nodes[v].kind != NodeKind::Decision) chance.push_back(v);
  std::vector<int> values(def.nodes.size(), 0);
  for (std::size_t s = 0; s < def.action_space.decision_nodes.size(); ++s)
    values[def.action_space.decision_nodes[s]] = a[s];
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << chance.size()); ++m) {
    for (std::size_t j = 0; j < chance.size(); ++j) values[chance[j]] = static_cast<int>((m >> j) & 1u);
    f(values);
  }
}

inline double oracle_expected_reward(const DiagramDefinition& def, const ParamVector& theta, const Action& a) {
  double total = 0.0;
  for_each_assignment(def, a, [&](const std::vector<int>& values) {
    total += oracle_reward(def, values) * oracle_joint(def, values, theta);
  });
  return total;
}

// Cartesian product of the decision domains in lexicographic order, filtered
// by the distinctness and ordering rules.
inline std::vector<Action> oracle_actions(const DiagramDefinition& def) {
  std::vector<std::size_t> sizes;
  for (auto v : def.action_space.decision_nodes)
    for (const auto& dom : def.domains)
      if (dom.name == def.nodes[v].domain) sizes.push_back(dom.size);
  std::vector<Action> out;
  Action a(sizes.size(), 0);
  while (true) {
    bool keep = true;
    if (def.action_space.distinct_required) {
      std::set<int> seen(a.begin(), a.end());
      keep = seen.size() == a.size();
      if (keep && def.action_space.order == ActionOrder::Unordered) keep = std::is_sorted(a.begin(), a.end());
    }
    if (keep) out.push_back(a);
    std::size_t k = a.size();
    while (k > 0) {
      --k;
      if (static_cast<std::size_t>(++a[k]) < sizes[k]) break;
      a[k] = 0;
      if (k == 0) return out;
    }
    if (a.empty()) return out;
  }
}

struct OracleBest {
  Action action;
  double value = -std::numeric_limits<double>::infinity();
};

// First action in lexicographic order whose value is within 1e-12 of the
// maximum.
inline OracleBest oracle_best(const DiagramDefinition& def, const ParamVector& theta) {
  const auto actions = oracle_actions(def);
  std::vector<double> values;
  for (const auto& a : actions) values.push_back(oracle_expected_reward(def, theta, a));
  const double top = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (values[i] >= top - 1e-12) return {actions[i], top};
  return {};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("idbandit_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
