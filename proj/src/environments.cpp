#include "idbandit/environments.hpp"

#include <algorithm>

#include "idbandit/errors.hpp"
#include "idbandit/planner.hpp"

namespace idbandit {

namespace {

void check_unit(const std::vector<double>& v, const std::string& what) {
  for (double x : v)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
}

std::vector<double> ramp(std::size_t n, double denominator) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1) / denominator;
  return v;
}

NodeDefinition decision(const std::string& name, const std::string& domain) {
  NodeDefinition n;
  n.name = name;
  n.kind = NodeKind::Decision;
  n.domain = domain;
  return n;
}

NodeDefinition stochastic(const std::string& name, NodeKind kind, std::vector<std::size_t> parents,
                          std::vector<TableEntry> table = {}) {
  NodeDefinition n;
  n.name = name;
  n.kind = kind;
  n.parents = std::move(parents);
  n.table = std::move(table);
  return n;
}

std::vector<TableEntry> known_table(std::initializer_list<double> values) {
  std::vector<TableEntry> t;
  for (double v : values) t.push_back(TableEntry::known(v));
  return t;
}

// Replaces every known entry with a fresh parameter carrying the same value.
std::vector<TableEntry> learnable_table(const std::vector<TableEntry>& known, std::vector<double>& theta) {
  std::vector<TableEntry> t;
  for (const auto& e : known) {
    t.push_back(TableEntry::param(theta.size()));
    theta.push_back(e.value);
  }
  return t;
}

void check_sizes(std::size_t L, std::size_t K, std::size_t given) {
  if (L == 0 || K == 0) throw ConfigError("L and K must be positive");
  if (K > L) throw ConfigError("list length K exceeds the number of items L");
  if (given != L) throw ConfigError("expected " + std::to_string(L) + " item means, got " + std::to_string(given));
}

}  // namespace

BanditInstance make_instance(std::string name, DiagramDefinition def, ParamVector theta_star) {
  auto diagram = std::make_shared<const InfluenceDiagram>(InfluenceDiagram::build(std::move(def)));
  if (theta_star.size() != diagram->param_count())
    throw ConfigError("true parameter vector has the wrong length for " + name);
  check_unit(theta_star.values, "true parameters");
  const auto best = plan_action(*diagram, theta_star);
  return BanditInstance{std::move(name), std::move(diagram), std::move(theta_star), best.action, best.value};
}

BanditInstance make_cascade(std::size_t L, std::size_t K, const std::vector<double>& attractions,
                            CascadeVariant variant, bool learn_conditionals) {
  check_sizes(L, K, attractions.size());
  check_unit(attractions, "attractions");
  DiagramDefinition def;
  std::vector<double> theta;
  // Parent configuration index is value(p0) + 2 value(p1).
  const auto click = variant == CascadeVariant::Standard ? known_table({0, 0, 0, 1}) : known_table({0, 0, 1, 0});
  const auto exam = variant == CascadeVariant::Standard ? known_table({0, 0, 1, 0}) : known_table({0, 0, 0, 1});
  std::size_t prev_c = 0;
  std::size_t prev_e = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const std::string pos = std::to_string(k + 1);
    const std::size_t a = def.nodes.size();
    def.nodes.push_back(decision("A" + pos, "items"));
    const std::size_t w = def.nodes.size();
    def.nodes.push_back(stochastic("W" + pos, NodeKind::Latent, {a}));
    const std::size_t e = def.nodes.size();
    if (k == 0) {
      def.nodes.push_back(stochastic("E" + pos, NodeKind::Latent, {}, known_table({1.0})));
    } else {
      def.nodes.push_back(stochastic("E" + pos, NodeKind::Latent, {prev_c, prev_e},
                                     learn_conditionals ? learnable_table(exam, theta) : exam));
    }
    const std::size_t c = def.nodes.size();
    def.nodes.push_back(stochastic("C" + pos, NodeKind::Observed, {w, e},
                                   learn_conditionals ? learnable_table(click, theta) : click));
    def.action_space.decision_nodes.push_back(a);
    def.reward.nodes.push_back(c);
    def.reward.weights.push_back(1.0);
    prev_c = c;
    prev_e = e;
  }
  def.domains.push_back({"items", L, theta.size()});
  theta.insert(theta.end(), attractions.begin(), attractions.end());
  def.reward.form = RewardForm::LinearSum;
  def.action_space.distinct_required = true;
  def.action_space.order = ActionOrder::Ordered;
  const std::string name = variant == CascadeVariant::Standard ? "cascade1" : "cascade2";
  return make_instance(name, std::move(def), ParamVector{std::move(theta)});
}

BanditInstance make_pbm(std::size_t L, std::size_t K, const std::vector<double>& attractions,
                        const std::vector<double>& exam_probs, bool exam_known) {
  check_sizes(L, K, attractions.size());
  check_unit(attractions, "attractions");
  if (exam_probs.size() != K) throw ConfigError("expected one examination probability per position");
  check_unit(exam_probs, "examination probabilities");
  DiagramDefinition def;
  std::vector<double> theta;
  for (std::size_t k = 0; k < K; ++k) {
    const std::string pos = std::to_string(k + 1);
    const std::size_t a = def.nodes.size();
    def.nodes.push_back(decision("A" + pos, "items"));
    const std::size_t w = def.nodes.size();
    def.nodes.push_back(stochastic("W" + pos, NodeKind::Latent, {a}));
    const std::size_t e = def.nodes.size();
    if (exam_known) {
      def.nodes.push_back(stochastic("E" + pos, NodeKind::Latent, {}, {TableEntry::known(exam_probs[k])}));
    } else {
      def.nodes.push_back(stochastic("E" + pos, NodeKind::Latent, {}, {TableEntry::param(theta.size())}));
      theta.push_back(exam_probs[k]);
    }
    const std::size_t c = def.nodes.size();
    def.nodes.push_back(stochastic("C" + pos, NodeKind::Observed, {w, e}, known_table({0, 0, 0, 1})));
    def.action_space.decision_nodes.push_back(a);
    def.reward.nodes.push_back(c);
    def.reward.weights.push_back(1.0);
  }
  def.domains.push_back({"items", L, theta.size()});
  theta.insert(theta.end(), attractions.begin(), attractions.end());
  def.reward.form = RewardForm::LinearSum;
  def.action_space.distinct_required = true;
  def.action_space.order = ActionOrder::Ordered;
  return make_instance("pbm", std::move(def), ParamVector{std::move(theta)});
}

BanditInstance make_semi_bandit(std::size_t L, std::size_t K, const std::vector<double>& means) {
  check_sizes(L, K, means.size());
  check_unit(means, "item means");
  DiagramDefinition def;
  for (std::size_t k = 0; k < K; ++k) {
    const std::string pos = std::to_string(k + 1);
    const std::size_t a = def.nodes.size();
    def.nodes.push_back(decision("A" + pos, "items"));
    const std::size_t x = def.nodes.size();
    def.nodes.push_back(stochastic("X" + pos, NodeKind::Observed, {a}));
    def.action_space.decision_nodes.push_back(a);
    def.reward.nodes.push_back(x);
    def.reward.weights.push_back(1.0);
  }
  def.domains.push_back({"items", L, 0});
  def.reward.form = RewardForm::LinearSum;
  def.action_space.distinct_required = true;
  def.action_space.order = ActionOrder::Unordered;
  return make_instance("semibandit", std::move(def), ParamVector{means});
}

BanditInstance make_rank1(const std::vector<double>& U, const std::vector<double>& V) {
  if (U.empty() || V.empty()) throw ConfigError("row and column factors must be nonempty");
  check_unit(U, "row factors");
  check_unit(V, "column factors");
  DiagramDefinition def;
  def.domains.push_back({"rows", U.size(), 0});
  def.domains.push_back({"cols", V.size(), U.size()});
  def.nodes.push_back(decision("A1", "rows"));
  def.nodes.push_back(decision("A2", "cols"));
  def.nodes.push_back(stochastic("Z1", NodeKind::Latent, {0}));
  def.nodes.push_back(stochastic("Z2", NodeKind::Latent, {1}));
  def.nodes.push_back(stochastic("X", NodeKind::Observed, {2, 3}, known_table({0, 0, 0, 1})));
  def.reward.form = RewardForm::SingleNode;
  def.reward.nodes = {4};
  def.reward.weights = {1.0};
  def.action_space.decision_nodes = {0, 1};
  def.action_space.distinct_required = false;
  std::vector<double> theta(U);
  theta.insert(theta.end(), V.begin(), V.end());
  return make_instance("rank1", std::move(def), ParamVector{std::move(theta)});
}

const std::vector<std::string>& environment_names() {
  static const std::vector<std::string> names{"cascade1", "cascade2", "pbm1",      "pbm2",
                                              "rank1_1",  "rank1_2",  "semibandit"};
  return names;
}

BanditInstance make_environment(const std::string& name, const nlohmann::json& overrides) {
  try {
    for (const auto& [key, _] : overrides.items()) {
      static const std::vector<std::string> known{"L", "K", "attractions", "learn_conditionals", "exam_probs",
                                                  "exam_known", "means", "U", "V"};
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("unknown environment override '" + key + "'");
    }
    const auto L = overrides.value("L", std::size_t{20});
    const auto K = overrides.value("K", std::size_t{2});
    auto items = [&](const char* key) {
      return overrides.contains(key) ? overrides[key].get<std::vector<double>>() : ramp(L, static_cast<double>(L));
    };
    BanditInstance inst;
    if (name == "cascade1" || name == "cascade2") {
      const auto variant = name == "cascade1" ? CascadeVariant::Standard : CascadeVariant::Flipped;
      inst = make_cascade(L, K, items("attractions"), variant, overrides.value("learn_conditionals", false));
    } else if (name == "pbm1" || name == "pbm2") {
      std::vector<double> exam = name == "pbm1" ? std::vector<double>{0.7, 0.7} : std::vector<double>{0.8, 0.2};
      if (overrides.contains("exam_probs")) exam = overrides["exam_probs"].get<std::vector<double>>();
      inst = make_pbm(L, K, items("attractions"), exam, overrides.value("exam_known", false));
    } else if (name == "semibandit") {
      inst = make_semi_bandit(L, K, items("means"));
    } else if (name == "rank1_1" || name == "rank1_2") {
      const bool first = name == "rank1_1";
      auto U = overrides.contains("U") ? overrides["U"].get<std::vector<double>>() : ramp(8, first ? 16.0 : 8.0);
      auto V = overrides.contains("V") ? overrides["V"].get<std::vector<double>>() : ramp(10, first ? 20.0 : 10.0);
      inst = make_rank1(U, V);
    } else {
      throw ConfigError("unknown environment '" + name + "'");
    }
    inst.name = name;
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad override for environment '" + name + "': " + e.what());
  }
}

}  // namespace idbandit
