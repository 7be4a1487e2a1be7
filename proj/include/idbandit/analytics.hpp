#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "idbandit/environments.hpp"
#include "idbandit/rng.hpp"
#include "idbandit/variational.hpp"

namespace idbandit {

/// Number of parameters observed in one episode: stochastic nodes whose
/// governing entry is learnable and which, together with all their parents,
/// are de facto observed.
std::size_t observed_parameter_count(const InfluenceDiagram& diagram, const ParamVector& theta, const Action& a,
                                     const Assignment& full);

struct OMaxEstimate {
  double value = 0.0;
  Action argmax;
  std::vector<double> per_action;  // in enumeration order
};

/// max over actions of the Monte Carlo mean of observed_parameter_count, with
/// theta drawn from `prior` and an episode sampled under it for every sample.
OMaxEstimate estimate_o_max(const BanditInstance& instance, const BetaState& prior, std::size_t num_samples, Rng& rng);

/// C sqrt(6 (d + L) O_max n log n (1 + log n)) + (C + 2 pi^2 B / 3)(d + L).
double bound_value(double C, std::size_t L_total, std::size_t d, double o_max, double n, double B);

enum class Monotonicity { Increasing, Decreasing, Violated };

const char* to_string(Monotonicity m);

/// Grid of `points` base values spread over [0, 1 - step].
std::vector<double> monotonicity_grid(std::size_t points, double step);

/// Signs of r(a, theta with theta_i = g + step) - r(a, theta with theta_i = g)
/// over every grid point g and feasible action a. Differences within 1e-12 of
/// zero are compatible with either direction.
Monotonicity check_monotonicity(const BanditInstance& instance, const ParamVector& theta, std::size_t coordinate,
                                const std::vector<double>& grid, double step);

}  // namespace idbandit
