#pragma once

namespace idbandit {

/// Digamma function psi(x) for x > 0.
///
/// Shifts the argument above 6 with the recurrence psi(x) = psi(x + 1) - 1/x
/// and evaluates the asymptotic series there. Absolute error is below 1e-14
/// on (0, 1e8].
double digamma(double x);

/// log B(a, b) = lgamma(a) + lgamma(b) - lgamma(a + b), for a, b > 0.
double log_beta(double a, double b);

/// Differential entropy of Beta(a, b).
double beta_entropy(double a, double b);

/// E[log theta] and E[log(1 - theta)] under Beta(a, b).
struct BetaLogMoments {
  double log_theta;
  double log_one_minus_theta;
};
BetaLogMoments beta_log_moments(double a, double b);

}  // namespace idbandit
