#include "fedsight/rng.hpp"

#include <cmath>

namespace fedsight {

double normal_double(Rng& rng) {
  double u1 = uniform_double(rng);
  double u2 = uniform_double(rng);
  while (u1 <= 0.0) {
    u1 = uniform_double(rng);
  }
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t derive_sub_seed(std::uint64_t root_seed, std::string_view meeting_id,
                              int run_index, std::string_view stage) {
  std::uint64_t h = fnv1a(meeting_id);
  h = fnv1a(stage, h);
  h ^= static_cast<std::uint64_t>(run_index) + 0x9e3779b97f4a7c15ull;
  h *= 1099511628211ull;
  h ^= root_seed;
  h *= 1099511628211ull;
  return h;
}

}  // namespace fedsight
