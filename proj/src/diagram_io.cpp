#include "idbandit/diagram_io.hpp"

#include <fstream>
#include <algorithm>

#include "idbandit/errors.hpp"

namespace idbandit {

using nlohmann::json;

namespace {

NodeKind parse_kind(const std::string& s) {
  if (s == "decision") return NodeKind::Decision;
  if (s == "latent") return NodeKind::Latent;
  if (s == "observed") return NodeKind::Observed;
  throw ConfigError("unknown node kind '" + s + "'");
}

std::string kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Decision: return "decision";
    case NodeKind::Latent: return "latent";
    case NodeKind::Observed: return "observed";
  }
  return "latent";
}

std::size_t resolve(const json& ref, const std::vector<std::string>& names) {
  if (ref.is_number_unsigned()) return ref.get<std::size_t>();
  if (ref.is_string()) {
    const auto s = ref.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == s) return i;
    throw ConfigError("reference to unknown node '" + s + "'");
  }
  throw ConfigError("node references must be names or ids");
}

}  // namespace

DiagramDefinition diagram_from_json(const json& doc) {
  try {
    DiagramDefinition def;
    std::vector<std::string> names;
    for (const auto& n : doc.at("nodes")) names.push_back(n.at("name").get<std::string>());

    std::size_t max_table_param = 0;
    bool any_table_param = false;
    for (const auto& n : doc.at("nodes")) {
      NodeDefinition node;
      node.name = n.at("name").get<std::string>();
      node.kind = parse_kind(n.at("kind").get<std::string>());
      if (n.contains("parents"))
        for (const auto& p : n["parents"]) node.parents.push_back(resolve(p, names));
      if (n.contains("domain")) node.domain = n["domain"].get<std::string>();
      if (n.contains("table")) {
        for (const auto& e : n["table"]) {
          if (e.is_number()) {
            node.table.push_back(TableEntry::known(e.get<double>()));
          } else {
            const auto index = e.at("param").get<std::size_t>();
            node.table.push_back(TableEntry::param(index));
            max_table_param = std::max(max_table_param, index);
            any_table_param = true;
          }
        }
      }
      def.nodes.push_back(std::move(node));
    }

    std::size_t cursor = any_table_param ? max_table_param + 1 : 0;
    if (doc.contains("domains")) {
      for (const auto& d : doc["domains"]) {
        DecisionDomain dom;
        dom.name = d.at("name").get<std::string>();
        dom.size = d.at("size").get<std::size_t>();
        dom.offset = d.contains("offset") ? d["offset"].get<std::size_t>() : cursor;
        cursor = dom.offset + dom.size;
        def.domains.push_back(dom);
      }
    }

    const auto& r = doc.at("reward");
    const auto form = r.at("form").get<std::string>();
    if (form == "linear_sum") {
      def.reward.form = RewardForm::LinearSum;
      for (const auto& v : r.at("nodes")) def.reward.nodes.push_back(resolve(v, names));
      if (r.contains("weights")) {
        def.reward.weights = r["weights"].get<std::vector<double>>();
      } else {
        def.reward.weights.assign(def.reward.nodes.size(), 1.0);
      }
    } else if (form == "single_node") {
      def.reward.form = RewardForm::SingleNode;
      def.reward.nodes.push_back(resolve(r.at("node"), names));
      def.reward.weights.push_back(r.value("weight", 1.0));
    } else if (form == "table") {
      def.reward.form = RewardForm::Table;
      for (const auto& e : r.at("entries")) def.reward.table[e.at("mask").get<std::uint64_t>()] = e.at("value").get<double>();
    } else {
      throw ConfigError("unknown reward form '" + form + "'");
    }

    const auto& as = doc.at("action_space");
    for (const auto& v : as.at("decisions")) def.action_space.decision_nodes.push_back(resolve(v, names));
    def.action_space.distinct_required = as.value("distinct", false);
    const auto order = as.value("order", std::string("ordered"));
    if (order == "ordered") {
      def.action_space.order = ActionOrder::Ordered;
    } else if (order == "unordered") {
      def.action_space.order = ActionOrder::Unordered;
    } else {
      throw ConfigError("unknown action order '" + order + "'");
    }
    if (doc.contains("reward_bound") && !doc["reward_bound"].is_null())
      def.reward_bound = doc["reward_bound"].get<double>();
    return def;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed diagram document: ") + e.what());
  }
}

json diagram_to_json(const DiagramDefinition& def) {
  json doc;
  doc["domains"] = json::array();
  for (const auto& d : def.domains) doc["domains"].push_back({{"name", d.name}, {"size", d.size}, {"offset", d.offset}});
  auto name_of = [&](std::size_t id) { return id < def.nodes.size() ? json(def.nodes[id].name) : json(id); };
  doc["nodes"] = json::array();
  for (const auto& n : def.nodes) {
    json node{{"name", n.name}, {"kind", kind_name(n.kind)}};
    json parents = json::array();
    for (auto p : n.parents) parents.push_back(name_of(p));
    node["parents"] = parents;
    if (!n.domain.empty()) node["domain"] = n.domain;
    if (n.kind != NodeKind::Decision && !n.table.empty()) {
      json table = json::array();
      for (const auto& e : n.table) table.push_back(e.learnable ? json{{"param", e.index}} : json(e.value));
      node["table"] = table;
    }
    doc["nodes"].push_back(node);
  }
  json reward;
  switch (def.reward.form) {
    case RewardForm::LinearSum: {
      reward["form"] = "linear_sum";
      json nodes = json::array();
      for (auto v : def.reward.nodes) nodes.push_back(name_of(v));
      reward["nodes"] = nodes;
      reward["weights"] = def.reward.weights;
      break;
    }
    case RewardForm::SingleNode:
      reward["form"] = "single_node";
      reward["node"] = name_of(def.reward.nodes.front());
      reward["weight"] = def.reward.weights.empty() ? 1.0 : def.reward.weights.front();
      break;
    case RewardForm::Table: {
      reward["form"] = "table";
      json entries = json::array();
      for (const auto& [mask, value] : def.reward.table) entries.push_back({{"mask", mask}, {"value", value}});
      reward["entries"] = entries;
      break;
    }
  }
  doc["reward"] = reward;
  json decisions = json::array();
  for (auto v : def.action_space.decision_nodes) decisions.push_back(name_of(v));
  doc["action_space"] = {{"decisions", decisions},
                         {"distinct", def.action_space.distinct_required},
                         {"order", def.action_space.order == ActionOrder::Ordered ? "ordered" : "unordered"}};
  if (def.reward_bound) doc["reward_bound"] = *def.reward_bound;
  return doc;
}

DiagramDefinition load_diagram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open diagram file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse diagram file " + path + ": " + e.what());
  }
  return diagram_from_json(doc);
}

void save_diagram(const std::string& path, const DiagramDefinition& def) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write diagram file " + path);
  out << diagram_to_json(def).dump(2) << '\n';
  if (!out) throw IoError("failed writing diagram file " + path);
}

}  // namespace idbandit
