#include "idbandit/policies.hpp"

#include "idbandit/errors.hpp"
#include "idbandit/posterior_io.hpp"

namespace idbandit {

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "idTS_fullobs") return PolicyKind::FullyObservable;
  if (name == "idTSfull") return PolicyKind::FeedbackRelaxed;
  if (name == "idTSvi") return PolicyKind::Variational;
  if (name == "idTSinc") return PolicyKind::Incremental;
  if (name == "PF") return PolicyKind::ParticleFilter;
  throw ConfigError("unknown policy '" + name + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::FullyObservable: return "idTS_fullobs";
    case PolicyKind::FeedbackRelaxed: return "idTSfull";
    case PolicyKind::Variational: return "idTSvi";
    case PolicyKind::Incremental: return "idTSinc";
    case PolicyKind::ParticleFilter: return "PF";
  }
  return "idTSvi";
}

namespace {

class BetaPolicy : public Policy {
 public:
  BetaPolicy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram)
      : config_(config), diagram_(std::move(diagram)), planner_(*diagram_) {
    prior_ = config.prior ? *config.prior : uniform_prior(diagram_->param_count());
    if (prior_.size() != diagram_->param_count()) throw ConfigError("prior size does not match the diagram");
  }

  Action act(std::size_t, Rng& rng) override { return planner_.plan(sample_theta(posterior(), rng)).action; }

  std::string name() const override { return to_string(config_.kind); }
  nlohmann::json snapshot() const override { return posterior_to_json(posterior()); }

 protected:
  virtual const BetaState& posterior() const = 0;

  PolicyConfig config_;
  std::shared_ptr<const InfluenceDiagram> diagram_;
  Planner planner_;
  BetaState prior_;
};

// idTS_fullobs and idTSfull: conjugate updates from complete assignments.
class ConjugatePolicy final : public BetaPolicy {
 public:
  ConjugatePolicy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram)
      : BetaPolicy(config, std::move(diagram)) {
    if (config.kind == PolicyKind::FullyObservable && diagram_->has_latents())
      throw ConfigError("idTS_fullobs needs a diagram without latent nodes; use idTSfull, idTSvi or idTSinc");
    state_ = prior_;
  }

  void update(const Action& a, const Assignment& observed, const Assignment* latent, Rng&) override {
    if (config_.kind == PolicyKind::FullyObservable) {
      state_ = exact_beta_update(std::move(state_), *diagram_, a, observed);
      return;
    }
    if (latent == nullptr) throw ConfigError("idTSfull needs the latent values of every step");
    state_ = exact_beta_update(std::move(state_), *diagram_, a, *latent);
  }

  bool feedback_relaxed() const override { return config_.kind == PolicyKind::FeedbackRelaxed; }

 private:
  const BetaState& posterior() const override { return state_; }
  BetaState state_;
};

class VariationalPolicy final : public BetaPolicy {
 public:
  VariationalPolicy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram)
      : BetaPolicy(config, diagram), history_(diagram) {
    check_enumeration_cap(*diagram_);
    state_ = initial_state(history_, prior_);
  }

  void update(const Action& a, const Assignment& observed, const Assignment*, Rng& rng) override {
    history_.push(a, observed);
    if (config_.kind == PolicyKind::Incremental) {
      IncrementalOptions options;
      options.epsilon = config_.epsilon;
      options.max_iters = config_.max_iters;
      fit_vi_incremental(state_, history_, options);
      return;
    }
    FitOptions options;
    options.epsilon = config_.epsilon;
    options.max_sweeps = config_.max_sweeps;
    if (config_.jitter) options.jitter = &rng;
    BetaState warm;
    if (config_.warm_start) {
      warm = state_.q_theta;
      options.warm_start = &warm;
    }
    refit_vi(state_, history_, prior_, options);
  }

  bool feedback_relaxed() const override { return false; }

 private:
  const BetaState& posterior() const override { return state_.q_theta; }

  static void check_enumeration_cap(const InfluenceDiagram& d) {
    if (d.latent_nodes().size() > kEnumerationCap) throw EnumerationCapError("too many latent nodes for the E-step");
  }

  ObservationHistory history_;
  VariationalState state_;
};

class ParticlePolicy final : public Policy {
 public:
  ParticlePolicy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram)
      : config_(config), diagram_(std::move(diagram)), planner_(*diagram_) {}

  Action act(std::size_t, Rng& rng) override {
    if (set_.size() == 0) {
      set_ = initial_particles(*diagram_, config_.particles, config_.sigma, rng);
      best_ = set_.particles.front();
    }
    return planner_.plan(best_).action;
  }

  void update(const Action& a, const Assignment&, const Assignment* latent, Rng& rng) override {
    if (latent == nullptr) throw ConfigError("PF needs the latent values of every step");
    if (set_.size() == 0) {
      set_ = initial_particles(*diagram_, config_.particles, config_.sigma, rng);
      best_ = set_.particles.front();
    }
    auto step = pf_step(set_, *diagram_, a, *latent, rng);
    best_ = std::move(step.best);
    set_ = std::move(step.next);
  }

  bool feedback_relaxed() const override { return true; }
  std::string name() const override { return "PF"; }

  nlohmann::json snapshot() const override {
    nlohmann::json particles = nlohmann::json::array();
    for (const auto& p : set_.particles) particles.push_back(p.values);
    return {{"sigma", set_.sigma}, {"best", best_.values}, {"particles", particles}, {"weights", set_.weights}};
  }

 private:
  PolicyConfig config_;
  std::shared_ptr<const InfluenceDiagram> diagram_;
  Planner planner_;
  ParticleSet set_;
  ParamVector best_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, std::shared_ptr<const InfluenceDiagram> diagram) {
  if (!diagram) throw ConfigError("policy needs a diagram");
  switch (config.kind) {
    case PolicyKind::FullyObservable:
    case PolicyKind::FeedbackRelaxed:
      return std::make_unique<ConjugatePolicy>(config, std::move(diagram));
    case PolicyKind::Variational:
    case PolicyKind::Incremental:
      if (!(config.epsilon > 0.0)) throw ConfigError("convergence threshold must be positive");
      return std::make_unique<VariationalPolicy>(config, std::move(diagram));
    case PolicyKind::ParticleFilter:
      if (config.particles == 0) throw ConfigError("particle count must be at least 1");
      if (!(config.sigma >= 0.0)) throw ConfigError("particle sigma must be nonnegative");
      return std::make_unique<ParticlePolicy>(config, std::move(diagram));
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace idbandit
