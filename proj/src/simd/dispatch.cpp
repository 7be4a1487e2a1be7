#include <atomic>
#include <cstdlib>
#include <cstring>

#include "idbandit/simd/kernels.hpp"

namespace idbandit {

#if IDBANDIT_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if IDBANDIT_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (supported) return &avx2_kernel_table();
#endif
  return nullptr;
}

namespace {

const KernelTable* choose(const char* name) {
  if (name == nullptr || std::strcmp(name, "auto") == 0) {
    const KernelTable* best = avx2_kernels();
    return best != nullptr ? best : &scalar_kernels();
  }
  if (std::strcmp(name, "scalar") == 0) return &scalar_kernels();
  if (std::strcmp(name, "avx2") == 0) return avx2_kernels();
  return nullptr;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{[] {
    const KernelTable* chosen = choose(std::getenv("IDBANDIT_KERNELS"));
    return chosen != nullptr ? chosen : choose("auto");
  }()};
  return table;
}

}  // namespace

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

bool select_kernels(const char* name) {
  const KernelTable* chosen = choose(name);
  if (chosen == nullptr) return false;
  current().store(chosen, std::memory_order_release);
  return true;
}

}  // namespace idbandit
