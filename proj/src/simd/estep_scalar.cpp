#include <algorithm>
#include <cmath>
#include <limits>

#include "idbandit/simd/kernels.hpp"

namespace idbandit {

namespace {

void log_weights(const double* elog, const StepKernelView& step, double* logw) {
  const std::size_t n = step.configs;
  for (std::size_t z = 0; z < n; ++z) logw[z] = step.known[z];
  if (step.weights != nullptr) {
    for (std::size_t g = 0; g < step.groups; ++g) {
      const double e = elog[step.group_codes[g]];
      const double* w = step.weights + g * n;
      for (std::size_t z = 0; z < n; ++z) logw[z] += w[z] * e;
    }
    return;
  }
  for (std::size_t j = 0; j < step.slots; ++j) {
    const std::int32_t* codes = step.codes + j * n;
    for (std::size_t z = 0; z < n; ++z) logw[z] += elog[codes[z]];
  }
}

EStepSums estep_scalar(const double* elog, const StepKernelView& step, double* q) {
  const std::size_t n = step.configs;
  log_weights(elog, step, q);

  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < n; ++z) peak = std::max(peak, q[z]);

  double total = 0.0;
  double weighted_logw = 0.0;
  double weighted_known = 0.0;
  for (std::size_t z = 0; z < n; ++z) {
    const double w = std::exp(q[z] - peak);
    total += w;
    weighted_logw += w * q[z];
    weighted_known += w * step.known[z];
    q[z] = w;
  }
  const double inv = 1.0 / total;
  for (std::size_t z = 0; z < n; ++z) q[z] *= inv;
  return {peak + std::log(total), weighted_logw * inv, weighted_known * inv};
}

}  // namespace

void accumulate_scalar(const StepKernelView& step, std::size_t configs, const double* q, double* stats) {
  if (step.weights != nullptr) {
    for (std::size_t g = 0; g < step.groups; ++g) {
      const double* w = step.weights + g * step.configs;
      double s = 0.0;
      for (std::size_t z = 0; z < configs; ++z) s += w[z] * q[z];
      stats[step.group_codes[g]] += s;
    }
    return;
  }
  for (std::size_t j = 0; j < step.slots; ++j) {
    const std::int32_t* codes = step.codes + j * step.configs;
    for (std::size_t z = 0; z < configs; ++z) stats[codes[z]] += q[z];
  }
}

EStepSums estep_accumulate_scalar(const double* elog, const StepKernelView& step, std::size_t configs, double* q,
                                  double* stats) {
  const EStepSums sums = estep_scalar(elog, step, q);
  accumulate_scalar(step, configs, q, stats);
  return sums;
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &estep_scalar, &accumulate_scalar, &estep_accumulate_scalar};
  return table;
}

}  // namespace idbandit
