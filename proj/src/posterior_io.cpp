#include "idbandit/posterior_io.hpp"

#include <fstream>

#include "idbandit/errors.hpp"

namespace idbandit {

using nlohmann::json;

json posterior_to_json(const BetaState& state) {
  json params = json::array();
  for (std::size_t i = 0; i < state.size(); ++i)
    params.push_back({{"index", i}, {"alpha", state.pairs[i].alpha}, {"beta", state.pairs[i].beta}});
  return json{{"params", params}};
}

BetaState posterior_from_json(const json& doc) {
  try {
    const auto& params = doc.at("params");
    BetaState state;
    state.pairs.resize(params.size());
    std::vector<bool> seen(params.size(), false);
    for (const auto& p : params) {
      const auto i = p.at("index").get<std::size_t>();
      if (i >= params.size() || seen[i]) throw ConfigError("posterior indices must cover 0..n-1 exactly once");
      seen[i] = true;
      state.pairs[i] = {p.at("alpha").get<double>(), p.at("beta").get<double>()};
      if (!(state.pairs[i].alpha >= 0.0) || !(state.pairs[i].beta >= 0.0))
        throw ConfigError("posterior pseudo-counts must be nonnegative");
    }
    return state;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed posterior document: ") + e.what());
  }
}

void save_posterior(const std::string& path, const BetaState& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write posterior file " + path);
  out << posterior_to_json(state).dump(2) << '\n';
  if (!out) throw IoError("failed writing posterior file " + path);
}

BetaState load_posterior(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open posterior file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse posterior file " + path + ": " + e.what());
  }
  return posterior_from_json(doc);
}

}  // namespace idbandit
