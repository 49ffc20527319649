#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fedsight {

// All randomness in the project flows through mt19937_64 plus the helpers
// below. std::uniform_*_distribution is avoided on purpose: its output is
// not pinned by the standard, and replay determinism requires identical
// streams across toolchains.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] via rejection sampling (no modulo bias).
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) {  // full 64-bit span
    return static_cast<std::int64_t>(rng());
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % range);
}

// Standard normal via Box-Muller; consumes two draws per pair.
double normal_double(Rng& rng);

// FNV-1a over an arbitrary byte string; used to derive stable sub-seeds.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

// Stable per-(meeting, run, stage) sub-seed so concurrent scheduling cannot
// reorder any seeded behaviour.
std::uint64_t derive_sub_seed(std::uint64_t root_seed, std::string_view meeting_id,
                              int run_index, std::string_view stage);

}  // namespace fedsight
