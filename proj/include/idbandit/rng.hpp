#pragma once

#include <cstdint>
#include <random>

namespace idbandit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used as a counter-based mixer to derive independent
// generator seeds from (base seed, run index, stream id).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { Environment = 1, Policy = 2, Analytics = 3 };

// Seed for one (run, stream) pair: splitmix64(splitmix64(base + run) ^ stream).
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index, Stream stream) {
  return splitmix64(splitmix64(base_seed + run_index) ^ static_cast<std::uint64_t>(stream));
}

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t run_index, Stream stream) {
  return Rng(derive_seed(base_seed, run_index, stream));
}

}  // namespace idbandit
