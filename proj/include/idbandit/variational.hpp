#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "idbandit/compiled_step.hpp"
#include "idbandit/diagram.hpp"
#include "idbandit/rng.hpp"

namespace idbandit {

/// Exponent pair of theta^alpha (1 - theta)^beta, i.e. Beta(alpha + 1, beta + 1).
struct BetaPair {
  double alpha = 0.0;
  double beta = 0.0;
  friend bool operator==(const BetaPair&, const BetaPair&) = default;
};

/// Factored Beta distribution over all d + L_total learnable parameters.
struct BetaState {
  std::vector<BetaPair> pairs;

  std::size_t size() const { return pairs.size(); }
  double mean(std::size_t i) const { return (pairs[i].alpha + 1.0) / (pairs[i].alpha + pairs[i].beta + 2.0); }
  friend bool operator==(const BetaState&, const BetaState&) = default;
};

BetaState uniform_prior(std::size_t params);

/// Conjugate update from a complete assignment: every parameter whose slot is
/// realized gains one success or one failure.
BetaState exact_beta_update(BetaState state, const InfluenceDiagram& diagram, const Action& a, const Assignment& full);

/// theta_i ~ Beta(alpha_i + 1, beta_i + 1) independently; `pinned` entries are
/// copied instead of drawn (no generator draws are spent on them).
ParamVector sample_theta(const BetaState& q, const std::map<std::size_t, double>& pinned, Rng& rng);
ParamVector sample_theta(const BetaState& q, Rng& rng);

double sample_beta(double a, double b, Rng& rng);

/// Variational factor over the latent configuration of one step; bit j of the
/// configuration index is the value of the j-th latent node in id order.
struct LatentTable {
  std::size_t step = 0;
  std::vector<double> probs;
};

/// Expected sufficient statistics. Entry 2i holds the expected failures f_i
/// and entry 2i + 1 the expected successes s_i; the final entry absorbs
/// padding contributions and is never read.
struct ExpectedCounts {
  std::vector<double> stats;

  explicit ExpectedCounts(std::size_t params = 0) : stats(2 * params + 1, 0.0) {}
  std::size_t params() const { return stats.size() / 2; }
  double successes(std::size_t i) const { return stats[2 * i + 1]; }
  double failures(std::size_t i) const { return stats[2 * i]; }
  void add(const ExpectedCounts& other);
};

/// (alpha_i, beta_i) = prior + (s_i, f_i).
BetaState m_step(const BetaState& prior, const ExpectedCounts& counts);

/// Table of elog values indexed by code: [E log(1 - theta_0), E log theta_0, ...,
/// 0] with the trailing zero used by padding.
std::vector<double> expected_log_table(const BetaState& q);

/// One E-step for (a, x) under q_theta, as an independent table.
LatentTable e_step(const BetaState& q_theta, const InfluenceDiagram& diagram, const Action& a,
                   const Assignment& observed);

/// q(theta) plus one latent table per elapsed step, with the pieces of the
/// bound that depend on the tables alone.
class VariationalState {
 public:
  BetaState prior;
  BetaState q_theta;
  ExpectedCounts counts;
  std::vector<double> elbo_trace;
  std::size_t sweeps = 0;
  bool converged = false;

  std::size_t steps() const { return known_terms_.size(); }
  std::size_t configs() const { return configs_; }
  LatentTable latent_table(std::size_t l) const;
  std::span<const double> probs(std::size_t l) const { return {tables_.data() + l * padded_, configs_}; }

  /// sum_z q_l(z) log P_known(x_l, z) and H(q_l).
  double known_term(std::size_t l) const { return known_terms_[l]; }
  double table_entropy(std::size_t l) const { return entropies_[l]; }

  /// Bound from cached aggregates: prior, counts and per-table terms.
  double elbo_from_counts() const;

 private:
  friend class VariationalEngine;

  std::size_t configs_ = 0;
  std::size_t padded_ = 0;
  std::vector<double> tables_;  // steps x padded_
  std::vector<double> known_terms_;
  std::vector<double> entropies_;
};

enum class UpdateKind { EStep, MStep };

/// Called after each coordinate update with the bound at that point.
using ElboObserver = std::function<void(UpdateKind, double)>;

struct FitOptions {
  double epsilon = 1e-4;
  std::size_t max_sweeps = 50;
  // Pseudo-counts of q_theta start at prior + U[0, jitter_scale] when a
  // generator is given.
  Rng* jitter = nullptr;
  double jitter_scale = 0.1;
  // Start q_theta here instead of at the prior.
  const BetaState* warm_start = nullptr;
  ElboObserver observer;
};

struct IncrementalOptions {
  double epsilon = 1e-4;
  std::size_t max_iters = 30;
  ElboObserver observer;
};

/// Uniform tables, q_theta at the prior, then full E-sweeps alternated with
/// M-steps until the bound improves by less than epsilon or max_sweeps.
VariationalState fit_vi(const ObservationHistory& history, const BetaState& prior, const FitOptions& options = {});

/// Same as fit_vi, reusing the storage of `state`.
void refit_vi(VariationalState& state, const ObservationHistory& history, const BetaState& prior,
              const FitOptions& options = {});

/// Adds the newest step of `history` (state covers all earlier steps) and
/// alternates its E-step with M-steps. Earlier tables stay frozen. Returns the
/// number of (E, M) alternations executed.
std::size_t fit_vi_incremental(VariationalState& state, const ObservationHistory& history,
                               const IncrementalOptions& options = {});

/// Empty state at the prior, with tables sized for `history`'s diagram.
VariationalState initial_state(const ObservationHistory& history, const BetaState& prior);

/// Counts implied by the stored tables, summed in step order.
ExpectedCounts expected_counts(const VariationalState& state, const ObservationHistory& history);

/// Bound recomputed from its definition: expected log joint over every step
/// and latent configuration walked node by node, expected log prior, and the
/// entropies of q_theta and of every table.
double elbo(const VariationalState& state, const ObservationHistory& history);

}  // namespace idbandit
