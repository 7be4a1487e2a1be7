#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "idbandit/compiled_step.hpp"
#include "idbandit/diagram.hpp"
#include "idbandit/particle_filter.hpp"
#include "idbandit/planner.hpp"
#include "idbandit/rng.hpp"
#include "idbandit/variational.hpp"

namespace idbandit {

enum class PolicyKind { FullyObservable, FeedbackRelaxed, Variational, Incremental, ParticleFilter };

/// "idTS_fullobs", "idTSfull", "idTSvi", "idTSinc", "PF".
PolicyKind parse_policy_kind(const std::string& name);
std::string to_string(PolicyKind kind);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Variational;
  double epsilon = 1e-4;
  std::size_t max_sweeps = 50;
  std::size_t max_iters = 30;
  std::size_t particles = 20;
  double sigma = 0.05;
  bool warm_start = false;
  bool jitter = false;
  std::optional<BetaState> prior;  // uniform when absent
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual Action act(std::size_t t, Rng& rng) = 0;

  /// `observed` has latent nodes unset. `latent` is the complete assignment
  /// and is supplied only to feedback-relaxed policies.
  virtual void update(const Action& a, const Assignment& observed, const Assignment* latent, Rng& rng) = 0;

  /// Whether the policy is allowed to see latent values.
  virtual bool feedback_relaxed() const = 0;

  virtual std::string name() const = 0;

  /// Current posterior: Beta pairs, or the particle set for PF.
  virtual nlohmann::json snapshot() const = 0;
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram);

}  // namespace idbandit
