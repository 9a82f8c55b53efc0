#pragma once

#include <cstdint>
#include <random>

namespace phi4 {

/// Independent random streams derived from one global seed. Each stream is
/// addressed by (seed, stream id, purpose, counter); the trajectory index is
/// the stream id and the time-step index is the counter for noise draws.
enum class StreamPurpose : std::uint64_t {
  noise = 1,
  initial_z = 2,
  initial_x = 3,
  pcn = 4,
  selfcheck = 5,
  test = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream,
                                   StreamPurpose purpose,
                                   std::int64_t counter = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ static_cast<std::uint64_t>(counter));
  return std::mt19937_64(h);
}

}  // namespace phi4
