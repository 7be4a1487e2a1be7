#pragma once

#include <string>

#include <json.hpp>

#include "idbandit/diagram.hpp"

namespace idbandit {

// Diagram files are JSON documents:
//
//   {
//     "domains": [{"name": "items", "size": 20, "offset": 0}],
//     "nodes": [
//       {"name": "A1", "kind": "decision", "domain": "items"},
//       {"name": "W1", "kind": "latent", "parents": ["A1"]},
//       {"name": "C1", "kind": "observed", "parents": ["W1"], "table": [0.0, {"param": 0}]}
//     ],
//     "reward": {"form": "linear_sum", "nodes": ["C1"], "weights": [1.0]},
//     "action_space": {"decisions": ["A1"], "distinct": false, "order": "ordered"},
//     "reward_bound": 1.0
//   }
//
// Table entries are numbers (known probabilities) or {"param": i}. Parents and
// reward nodes may be given by name or id. Reward forms: "linear_sum",
// "single_node" ({"node": name}) and "table" ({"entries": [{"mask": m,
// "value": r}]}). Omitted domain offsets are laid out after the table
// parameters in declaration order; "reward_bound" is optional.

DiagramDefinition diagram_from_json(const nlohmann::json& doc);
nlohmann::json diagram_to_json(const DiagramDefinition& def);

DiagramDefinition load_diagram(const std::string& path);
void save_diagram(const std::string& path, const DiagramDefinition& def);

}  // namespace idbandit
