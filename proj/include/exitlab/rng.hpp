#pragma once

#include <cstdint>
#include <random>

namespace exitlab {

// splitmix64; used to derive statistically independent child seeds from a
// master seed so that episodes, searches and matches each get their own
// reproducible stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
  return splitmix64(splitmix64(base ^ splitmix64(stream)) ^ substream);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1). Hand-rolled so results do not depend on the
// standard library's distribution implementation.
inline double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline int rand_index(Rng& rng, int n) {
  return static_cast<int>(rand_unit(rng) * n) % n;
}

}  // namespace exitlab
