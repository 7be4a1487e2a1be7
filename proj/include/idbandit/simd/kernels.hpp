#pragma once

#include <cstddef>
#include <cstdint>

namespace idbandit {

// Lane count of the widest kernel (four doubles per AVX2 register).
inline constexpr std::size_t kKernelLanes = 4;

// Log weight of padding lanes. Finite so that q * log w stays 0 when q == 0.
inline constexpr double kPaddingLogWeight = -1e300;

// Two layouts of the learnable factors of a step. Gather: `codes[j * configs
// + z]` is the code of slot j in configuration z. Dense: `weights[g * configs
// + z]` is how often code `group_codes[g]` occurs in configuration z. Kernels
// use the dense layout when `weights` is non-null.
struct StepKernelView {
  const double* known;
  const std::int32_t* codes;
  std::size_t configs;  // padded, multiple of kKernelLanes
  std::size_t slots;
  const std::int32_t* group_codes = nullptr;
  const double* weights = nullptr;
  std::size_t groups = 0;
};

struct EStepSums {
  double log_normalizer;  // log sum_z exp(logw_z)
  double sum_q_logw;      // sum_z q_z logw_z
  double sum_q_known;     // sum_z q_z known_z
};

/// Evaluates logw_z = known_z + sum_j elog[code_jz] for every configuration,
/// normalizes q_z = exp(logw_z - log_normalizer) into `q` and returns the sums
/// needed for the evidence lower bound.
using EStepKernel = EStepSums (*)(const double* elog, const StepKernelView& step, double* q);

/// stats[code] += q_z for every code occurrence in configuration z < configs.
using AccumulateKernel = void (*)(const StepKernelView& step, std::size_t configs, const double* q, double* stats);

/// estep followed by accumulate.
using FusedKernel = EStepSums (*)(const double* elog, const StepKernelView& step, std::size_t configs, double* q,
                                  double* stats);

struct KernelTable {
  const char* name;
  EStepKernel estep;
  AccumulateKernel accumulate;
  FusedKernel estep_accumulate;
};

// Reference implementation.
const KernelTable& scalar_kernels();

// nullptr when not compiled in or unsupported by the running CPU.
const KernelTable* avx2_kernels();

/// Kernels used by the library. Chosen on first use: AVX2 when supported,
/// overridable with IDBANDIT_KERNELS=scalar|avx2.
const KernelTable& active_kernels();

/// Forces a kernel set by name ("scalar", "avx2", "auto"); returns false when
/// the request cannot be honored.
bool select_kernels(const char* name);

}  // namespace idbandit
