#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "idbandit/diagram.hpp"

namespace idbandit {

struct BanditInstance {
  std::string name;
  std::shared_ptr<const InfluenceDiagram> diagram;
  ParamVector theta_star;
  Action optimal_action;
  double optimal_value = 0.0;
};

/// Wraps a diagram and its true parameters, finding the optimum by enumeration.
BanditInstance make_instance(std::string name, DiagramDefinition def, ParamVector theta_star);

enum class CascadeVariant { Standard = 1, Flipped = 2 };

/// Cascade click model over positions k = 1..K with nodes A_k, W_k, E_k, C_k.
/// Standard: C_k = W_k E_k, E_k = (1 - C_{k-1}) E_{k-1}. Flipped: C_k =
/// (1 - W_k) E_k, E_k = C_{k-1} E_{k-1}. E_1 is fixed at 1. With
/// learn_conditionals the C and E tables become parameters (true values in
/// theta*) placed before the attractions.
BanditInstance make_cascade(std::size_t L, std::size_t K, const std::vector<double>& attractions,
                            CascadeVariant variant, bool learn_conditionals);

/// Position-based model: E_k ~ Bernoulli(exam_probs[k]) independently,
/// C_k = W_k E_k. Examination probabilities are learnable entries 0..K-1
/// unless exam_known.
BanditInstance make_pbm(std::size_t L, std::size_t K, const std::vector<double>& attractions,
                        const std::vector<double>& exam_probs, bool exam_known = false);

/// Combinatorial semi-bandit: X_k observed children of the decisions,
/// unordered distinct actions, reward sum_k X_k.
BanditInstance make_semi_bandit(std::size_t L, std::size_t K, const std::vector<double>& means);

/// Rank-1 bandit: row and column decisions over separate domains, latent
/// Z1, Z2, observed X = Z1 Z2 with reward X.
BanditInstance make_rank1(const std::vector<double>& U, const std::vector<double>& V);

/// Named environments: cascade1, cascade2, pbm1, pbm2, rank1_1, rank1_2,
/// semibandit. Overrides (all optional): L, K, attractions, learn_conditionals
/// (cascade), exam_probs, exam_known (pbm), means (semibandit), U, V (rank1).
BanditInstance make_environment(const std::string& name, const nlohmann::json& overrides = nlohmann::json::object());

const std::vector<std::string>& environment_names();

}  // namespace idbandit
