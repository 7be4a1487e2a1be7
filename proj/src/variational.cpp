#include "idbandit/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/special_functions.hpp"

namespace idbandit {

BetaState uniform_prior(std::size_t params) { return BetaState{std::vector<BetaPair>(params)}; }

BetaState exact_beta_update(BetaState state, const InfluenceDiagram& diagram, const Action& a,
                            const Assignment& full) {
  diagram.check_action(a);
  if (full.values.size() != diagram.node_count())
    throw IncompleteAssignmentError("assignment does not cover every node");
  Assignment work = full;
  const auto& decisions = diagram.decision_nodes();
  for (std::size_t s = 0; s < decisions.size(); ++s) work[decisions[s]] = a[s];
  for (auto v : diagram.stochastic_nodes()) {
    if (work[v] != 0 && work[v] != 1)
      throw IncompleteAssignmentError("node '" + diagram.node(v).name + "' is unset; the step needs variational updates");
  }
  for (auto v : diagram.stochastic_topo()) {
    const TableEntry e = diagram.governing_entry(v, work);
    if (!e.learnable) continue;
    auto& pair = state.pairs.at(e.index);
    (work[v] == 1 ? pair.alpha : pair.beta) += 1.0;
  }
  return state;
}

double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y == 0.0) return a >= b ? 1.0 : 0.0;
  return x / (x + y);
}

ParamVector sample_theta(const BetaState& q, const std::map<std::size_t, double>& pinned, Rng& rng) {
  ParamVector theta;
  theta.values.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (auto it = pinned.find(i); it != pinned.end()) {
      theta[i] = it->second;
      continue;
    }
    theta[i] = sample_beta(q.pairs[i].alpha + 1.0, q.pairs[i].beta + 1.0, rng);
  }
  return theta;
}

ParamVector sample_theta(const BetaState& q, Rng& rng) { return sample_theta(q, {}, rng); }

void ExpectedCounts::add(const ExpectedCounts& other) {
  for (std::size_t k = 0; k < stats.size(); ++k) stats[k] += other.stats[k];
}

BetaState m_step(const BetaState& prior, const ExpectedCounts& counts) {
  BetaState out = prior;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pairs[i].alpha += counts.successes(i);
    out.pairs[i].beta += counts.failures(i);
  }
  return out;
}

std::vector<double> expected_log_table(const BetaState& q) {
  std::vector<double> elog(2 * q.size() + 1, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto m = beta_log_moments(q.pairs[i].alpha + 1.0, q.pairs[i].beta + 1.0);
    elog[2 * i] = m.log_one_minus_theta;
    elog[2 * i + 1] = m.log_theta;
  }
  return elog;
}

LatentTable e_step(const BetaState& q_theta, const InfluenceDiagram& diagram, const Action& a,
                   const Assignment& observed) {
  if (q_theta.size() != diagram.param_count()) throw ConfigError("posterior size does not match the diagram");
  const CompiledStep step(diagram, a, observed);
  const auto elog = expected_log_table(q_theta);
  std::vector<double> q(step.padded_configs());
  active_kernels().estep(elog.data(), step.view(), q.data());
  q.resize(step.configs());
  return {0, std::move(q)};
}

namespace {

// sum_i E_q[log p(theta_i)] + H(q_i) + expected learnable log-likelihood.
double beta_terms(const BetaState& prior, const BetaState& q, const ExpectedCounts* counts) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = q.pairs[i].alpha + 1.0;
    const double b = q.pairs[i].beta + 1.0;
    const auto m = beta_log_moments(a, b);
    double alpha = prior.pairs[i].alpha;
    double beta = prior.pairs[i].beta;
    if (counts != nullptr) {
      alpha += counts->successes(i);
      beta += counts->failures(i);
    }
    total += alpha * m.log_theta + beta * m.log_one_minus_theta -
             log_beta(prior.pairs[i].alpha + 1.0, prior.pairs[i].beta + 1.0) + beta_entropy(a, b);
  }
  return total;
}

}  // namespace

LatentTable VariationalState::latent_table(std::size_t l) const {
  auto p = probs(l);
  return {l, std::vector<double>(p.begin(), p.end())};
}

double VariationalState::elbo_from_counts() const {
  double total = beta_terms(prior, q_theta, &counts);
  for (std::size_t l = 0; l < steps(); ++l) total += known_terms_[l] + entropies_[l];
  return total;
}

class VariationalEngine {
 public:
  static void reset(VariationalState& state, const ObservationHistory& history, const BetaState& prior) {
    if (prior.size() != history.diagram().param_count()) throw ConfigError("prior size does not match the diagram");
    state.prior = prior;
    state.q_theta = prior;
    state.counts = ExpectedCounts(prior.size());
    state.elbo_trace.clear();
    state.sweeps = 0;
    state.converged = false;
    state.configs_ = history.latent_configs();
    state.padded_ = (state.configs_ + kKernelLanes - 1) / kKernelLanes * kKernelLanes;
    state.tables_.clear();  // keeps capacity
    state.known_terms_.clear();
    state.entropies_.clear();
  }

  // Appends a uniform table for step l and adds its counts.
  static void push_uniform(VariationalState& state, const CompiledStep& step) {
    const std::size_t l = state.steps();
    state.tables_.resize((l + 1) * state.padded_, 0.0);
    const double share = 1.0 / static_cast<double>(state.configs_);
    std::fill_n(state.tables_.begin() + static_cast<std::ptrdiff_t>(l * state.padded_), state.configs_, share);
    state.known_terms_.push_back(step.uniform_known());
    state.entropies_.push_back(std::log(static_cast<double>(state.configs_)));
    for (const auto& [code, weight] : step.uniform_counts()) state.counts.stats[code] += weight;
  }

  static void estep(VariationalState& state, std::size_t l, const CompiledStep& step, const double* elog,
                    const KernelTable& kernels) {
    double* q = state.tables_.data() + l * state.padded_;
    const EStepSums sums = kernels.estep(elog, step.view(), q);
    state.known_terms_[l] = sums.sum_q_known;
    state.entropies_[l] = std::max(0.0, sums.log_normalizer - sums.sum_q_logw);
  }

  static void accumulate(const VariationalState& state, std::size_t l, const CompiledStep& step,
                         const KernelTable& kernels, ExpectedCounts& counts) {
    kernels.accumulate(step.view(), state.configs_, state.tables_.data() + l * state.padded_, counts.stats.data());
  }

  static void refit(VariationalState& state, const ObservationHistory& history, const BetaState& prior,
                    const FitOptions& options) {
    if (!(options.epsilon > 0.0)) throw ConfigError("convergence threshold must be positive");
    reset(state, history, prior);
    if (options.warm_start != nullptr) {
      if (options.warm_start->size() != prior.size()) throw ConfigError("warm start size does not match the prior");
      state.q_theta = *options.warm_start;
    }
    if (options.jitter != nullptr) {
      std::uniform_real_distribution<double> unit(0.0, options.jitter_scale);
      for (auto& pair : state.q_theta.pairs) {
        pair.alpha += unit(*options.jitter);
        pair.beta += unit(*options.jitter);
      }
    }
    // The first E-sweep overwrites every table, so the uniform tables are
    // only materialized when no sweep will run; their counts and bound terms
    // are needed either way.
    const std::size_t t = history.size();
    state.tables_.resize(t * state.padded_);
    state.known_terms_.resize(t);
    state.entropies_.assign(t, std::log(static_cast<double>(state.configs_)));
    for (std::size_t l = 0; l < t; ++l) {
      const CompiledStep& step = history.step(l);
      state.known_terms_[l] = step.uniform_known();
      for (const auto& [code, weight] : step.uniform_counts()) state.counts.stats[code] += weight;
    }
    if (options.max_sweeps == 0) {
      const double share = 1.0 / static_cast<double>(state.configs_);
      for (std::size_t l = 0; l < t; ++l) {
        double* q = state.tables_.data() + l * state.padded_;
        std::fill_n(q, state.padded_, 0.0);
        std::fill_n(q, state.configs_, share);
      }
    }

    const KernelTable& kernels = active_kernels();
    double current = state.elbo_from_counts();
    state.elbo_trace.push_back(current);
    while (state.sweeps < options.max_sweeps) {
      const auto elog = expected_log_table(state.q_theta);
      std::fill(state.counts.stats.begin(), state.counts.stats.end(), 0.0);
      double* q = state.tables_.data();
      for (std::size_t l = 0; l < t; ++l, q += state.padded_) {
        const StepKernelView& view = history.view(l);
        const EStepSums sums = kernels.estep_accumulate(elog.data(), view, state.configs_, q, state.counts.stats.data());
        state.known_terms_[l] = sums.sum_q_known;
        state.entropies_[l] = std::max(0.0, sums.log_normalizer - sums.sum_q_logw);
      }
      if (options.observer) options.observer(UpdateKind::EStep, state.elbo_from_counts());
      state.q_theta = m_step(state.prior, state.counts);
      const double next = state.elbo_from_counts();
      if (options.observer) options.observer(UpdateKind::MStep, next);
      state.elbo_trace.push_back(next);
      ++state.sweeps;
      const bool done = next - current < options.epsilon;
      current = next;
      if (done) {
        state.converged = true;
        break;
      }
    }
  }

  static std::size_t incremental(VariationalState& state, const ObservationHistory& history,
                                 const IncrementalOptions& options) {
    if (history.size() != state.steps() + 1)
      throw ConfigError("incremental update expects exactly one new step (state has " +
                        std::to_string(state.steps()) + ", history has " + std::to_string(history.size()) + ")");
    const std::size_t t = history.size() - 1;
    const CompiledStep& step = history.step(t);
    const ExpectedCounts frozen = state.counts;
    push_uniform(state, step);

    const KernelTable& kernels = active_kernels();
    double current = state.elbo_from_counts();
    state.elbo_trace.push_back(current);
    state.converged = false;
    ExpectedCounts fresh(state.prior.size());
    std::size_t iters = 0;
    while (iters < options.max_iters) {
      const auto elog = expected_log_table(state.q_theta);
      estep(state, t, step, elog.data(), kernels);
      std::fill(fresh.stats.begin(), fresh.stats.end(), 0.0);
      accumulate(state, t, step, kernels, fresh);
      for (std::size_t k = 0; k < fresh.stats.size(); ++k) state.counts.stats[k] = frozen.stats[k] + fresh.stats[k];
      if (options.observer) options.observer(UpdateKind::EStep, state.elbo_from_counts());
      state.q_theta = m_step(state.prior, state.counts);
      const double next = state.elbo_from_counts();
      if (options.observer) options.observer(UpdateKind::MStep, next);
      state.elbo_trace.push_back(next);
      ++iters;
      const bool done = next - current < options.epsilon;
      current = next;
      if (done) {
        state.converged = true;
        break;
      }
    }
    state.sweeps = iters;
    return iters;
  }
};

VariationalState initial_state(const ObservationHistory& history, const BetaState& prior) {
  VariationalState state;
  VariationalEngine::reset(state, history, prior);
  return state;
}

void refit_vi(VariationalState& state, const ObservationHistory& history, const BetaState& prior,
              const FitOptions& options) {
  VariationalEngine::refit(state, history, prior, options);
}

VariationalState fit_vi(const ObservationHistory& history, const BetaState& prior, const FitOptions& options) {
  VariationalState state;
  refit_vi(state, history, prior, options);
  return state;
}

std::size_t fit_vi_incremental(VariationalState& state, const ObservationHistory& history,
                               const IncrementalOptions& options) {
  return VariationalEngine::incremental(state, history, options);
}

ExpectedCounts expected_counts(const VariationalState& state, const ObservationHistory& history) {
  if (history.size() != state.steps()) throw ConfigError("latent tables are not aligned with the history");
  ExpectedCounts counts(state.prior.size());
  const KernelTable& kernels = scalar_kernels();
  for (std::size_t l = 0; l < history.size(); ++l) {
    auto p = state.probs(l);
    kernels.accumulate(history.step(l).view(), state.configs(), p.data(), counts.stats.data());
  }
  return counts;
}

double elbo(const VariationalState& state, const ObservationHistory& history) {
  if (history.size() != state.steps()) throw ConfigError("latent tables are not aligned with the history");
  const InfluenceDiagram& diagram = history.diagram();
  const auto& latents = diagram.latent_nodes();
  std::vector<BetaLogMoments> moments;
  moments.reserve(state.q_theta.size());
  for (const auto& pair : state.q_theta.pairs) moments.push_back(beta_log_moments(pair.alpha + 1.0, pair.beta + 1.0));

  double total = beta_terms(state.prior, state.q_theta, nullptr);
  for (std::size_t l = 0; l < history.size(); ++l) {
    Assignment work = history.observed(l);
    const Action& a = history.action(l);
    const auto& decisions = diagram.decision_nodes();
    for (std::size_t s = 0; s < decisions.size(); ++s) work[decisions[s]] = a[s];
    auto q = state.probs(l);
    for (std::size_t z = 0; z < q.size(); ++z) {
      if (q[z] == 0.0) continue;
      for (std::size_t j = 0; j < latents.size(); ++j) work[latents[j]] = static_cast<int>((z >> j) & 1u);
      double expected = 0.0;
      for (auto v : diagram.stochastic_nodes()) {
        const TableEntry e = diagram.governing_entry(v, work);
        const bool on = work[v] == 1;
        if (e.learnable) {
          expected += on ? moments[e.index].log_theta : moments[e.index].log_one_minus_theta;
        } else {
          const double p = clamp_probability(e.value);
          expected += std::log(on ? p : 1.0 - p);
        }
      }
      total += q[z] * (expected - std::log(q[z]));
    }
  }
  return total;
}

}  // namespace idbandit
