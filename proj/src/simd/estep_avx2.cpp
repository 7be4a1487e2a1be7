#include <immintrin.h>

#include <cmath>

#include "idbandit/simd/kernels.hpp"

namespace idbandit {

void accumulate_scalar(const StepKernelView& step, std::size_t configs, const double* q, double* stats);

namespace {

// exp(x) for four lanes: range reduction by ln 2, then a degree-12 Taylor
// polynomial on [-ln2/2, ln2/2] (truncation below 2e-16 relative). Lanes below
// -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

  __m256d e = _mm256_set1_pd(1.0 / 479001600.0);
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 39916800.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 3628800.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 362880.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 40320.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 5040.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 720.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 120.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 24.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0 / 6.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(0.5));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0));
  e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(1.0));

  // 2^n through the exponent field
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

inline double hsum(__m256d v) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d s = _mm_max_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

EStepSums estep_avx2(const double* elog, const StepKernelView& step, double* q) {
  const std::size_t n = step.configs;
  __m256d peak = _mm256_set1_pd(kPaddingLogWeight);
  if (step.weights != nullptr) {
    // Sixteen configurations per block stay in registers across all groups.
    std::size_t z = 0;
    for (; z + 16 <= n; z += 16) {
      __m256d a0 = _mm256_loadu_pd(step.known + z);
      __m256d a1 = _mm256_loadu_pd(step.known + z + 4);
      __m256d a2 = _mm256_loadu_pd(step.known + z + 8);
      __m256d a3 = _mm256_loadu_pd(step.known + z + 12);
      for (std::size_t g = 0; g < step.groups; ++g) {
        const __m256d e = _mm256_broadcast_sd(elog + step.group_codes[g]);
        const double* w = step.weights + g * n + z;
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w), e, a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + 4), e, a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w + 8), e, a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w + 12), e, a3);
      }
      _mm256_storeu_pd(q + z, a0);
      _mm256_storeu_pd(q + z + 4, a1);
      _mm256_storeu_pd(q + z + 8, a2);
      _mm256_storeu_pd(q + z + 12, a3);
      peak = _mm256_max_pd(peak, _mm256_max_pd(_mm256_max_pd(a0, a1), _mm256_max_pd(a2, a3)));
    }
    for (; z < n; z += 4) {
      __m256d acc = _mm256_loadu_pd(step.known + z);
      for (std::size_t g = 0; g < step.groups; ++g)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(step.weights + g * n + z), _mm256_broadcast_sd(elog + step.group_codes[g]),
                              acc);
      _mm256_storeu_pd(q + z, acc);
      peak = _mm256_max_pd(peak, acc);
    }
  } else {
    for (std::size_t z = 0; z < n; z += 4) {
      __m256d acc = _mm256_loadu_pd(step.known + z);
      for (std::size_t j = 0; j < step.slots; ++j) {
        const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(step.codes + j * n + z));
        acc = _mm256_add_pd(acc, _mm256_i32gather_pd(elog, idx, 8));
      }
      _mm256_storeu_pd(q + z, acc);
      peak = _mm256_max_pd(peak, acc);
    }
  }
  const double m = hmax(peak);
  const __m256d mv = _mm256_set1_pd(m);

  __m256d total = _mm256_setzero_pd();
  __m256d weighted_logw = _mm256_setzero_pd();
  __m256d weighted_known = _mm256_setzero_pd();
  for (std::size_t z = 0; z < n; z += 4) {
    const __m256d logw = _mm256_loadu_pd(q + z);
    const __m256d w = exp_pd(_mm256_sub_pd(logw, mv));
    total = _mm256_add_pd(total, w);
    weighted_logw = _mm256_fmadd_pd(w, logw, weighted_logw);
    weighted_known = _mm256_fmadd_pd(w, _mm256_loadu_pd(step.known + z), weighted_known);
    _mm256_storeu_pd(q + z, w);
  }
  const double sum = hsum(total);
  const double inv = 1.0 / sum;
  const __m256d iv = _mm256_set1_pd(inv);
  for (std::size_t z = 0; z < n; z += 4) _mm256_storeu_pd(q + z, _mm256_mul_pd(_mm256_loadu_pd(q + z), iv));
  return {m + std::log(sum), hsum(weighted_logw) * inv, hsum(weighted_known) * inv};
}

// Whole step (at most sixteen configurations, dense layout) held in
// registers: log weights, normalization and count accumulation in one pass.
template <int NB>
EStepSums estep_accumulate_small(const double* elog, const StepKernelView& step, double* q, double* stats) {
  constexpr std::size_t n = 4 * NB;
  __m256d a[NB];
  for (int b = 0; b < NB; ++b) a[b] = _mm256_loadu_pd(step.known + 4 * b);
  for (std::size_t g = 0; g < step.groups; ++g) {
    const __m256d e = _mm256_broadcast_sd(elog + step.group_codes[g]);
    const double* w = step.weights + g * n;
    for (int b = 0; b < NB; ++b) a[b] = _mm256_fmadd_pd(_mm256_loadu_pd(w + 4 * b), e, a[b]);
  }
  __m256d peak = a[0];
  for (int b = 1; b < NB; ++b) peak = _mm256_max_pd(peak, a[b]);
  const double m = hmax(peak);
  const __m256d mv = _mm256_set1_pd(m);

  __m256d total = _mm256_setzero_pd();
  __m256d weighted_logw = _mm256_setzero_pd();
  __m256d weighted_known = _mm256_setzero_pd();
  __m256d x[NB];
  for (int b = 0; b < NB; ++b) {
    x[b] = exp_pd(_mm256_sub_pd(a[b], mv));
    total = _mm256_add_pd(total, x[b]);
    weighted_logw = _mm256_fmadd_pd(x[b], a[b], weighted_logw);
    weighted_known = _mm256_fmadd_pd(x[b], _mm256_loadu_pd(step.known + 4 * b), weighted_known);
  }
  const double sum = hsum(total);
  const double inv = 1.0 / sum;
  const __m256d iv = _mm256_set1_pd(inv);
  for (int b = 0; b < NB; ++b) {
    x[b] = _mm256_mul_pd(x[b], iv);
    _mm256_storeu_pd(q + 4 * b, x[b]);
  }
  for (std::size_t g = 0; g < step.groups; ++g) {
    const double* w = step.weights + g * n;
    __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(w), x[0]);
    for (int b = 1; b < NB; ++b) acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + 4 * b), x[b], acc);
    stats[step.group_codes[g]] += hsum(acc);
  }
  return {m + std::log(sum), hsum(weighted_logw) * inv, hsum(weighted_known) * inv};
}

}  // namespace

void accumulate_avx2(const StepKernelView& step, std::size_t configs, const double* q, double* stats) {
  if (step.weights == nullptr) {
    accumulate_scalar(step, configs, q, stats);
    return;
  }
  // Padding lanes have zero weight, so whole padded vectors can be summed.
  for (std::size_t g = 0; g < step.groups; ++g) {
    const double* w = step.weights + g * step.configs;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t z = 0; z < step.configs; z += 4)
      s = _mm256_fmadd_pd(_mm256_loadu_pd(w + z), _mm256_loadu_pd(q + z), s);
    stats[step.group_codes[g]] += hsum(s);
  }
}

EStepSums estep_accumulate_avx2(const double* elog, const StepKernelView& step, std::size_t configs, double* q,
                                double* stats) {
  if (step.weights != nullptr) {
    switch (step.configs) {
      case 4: return estep_accumulate_small<1>(elog, step, q, stats);
      case 8: return estep_accumulate_small<2>(elog, step, q, stats);
      case 16: return estep_accumulate_small<4>(elog, step, q, stats);
      default: break;
    }
  }
  const EStepSums sums = estep_avx2(elog, step, q);
  accumulate_avx2(step, configs, q, stats);
  return sums;
}

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", &estep_avx2, &accumulate_avx2, &estep_accumulate_avx2};
  return table;
}

}  // namespace idbandit
