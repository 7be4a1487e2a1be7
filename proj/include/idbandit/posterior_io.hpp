#pragma once

#include <string>

#include <json.hpp>

#include "idbandit/variational.hpp"

namespace idbandit {

// Posterior snapshot document:
//   {"params": [{"index": 0, "alpha": 3.0, "beta": 1.5}, ...]}
// Indices must cover 0..n-1 exactly once, in any order.

nlohmann::json posterior_to_json(const BetaState& state);
BetaState posterior_from_json(const nlohmann::json& doc);

void save_posterior(const std::string& path, const BetaState& state);
BetaState load_posterior(const std::string& path);

}  // namespace idbandit
