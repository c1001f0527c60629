#pragma once

#include <cmath>
#include <cstdint>

namespace rankdiff::rng {

// SplitMix64 finalizer. Counter-based generation: every variate is a pure
// function of (key, counter), so trajectories are reproducible regardless
// of thread scheduling and coupled systems can replay identical noise.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Per-stream key derived from a master seed. Streams are indexed by the
// caller (particle index, replication index, ...).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ull));
}

// Two-level keys for nested indexing (replication, particle).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return stream_key(stream_key(seed, a), b);
}

inline std::uint64_t draw_bits(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + 0xd1342543de82ef95ull * (counter + 1));
}

// Uniform on (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  return (static_cast<double>(draw_bits(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard Gaussian via Box-Muller; consumes counters 2c and 2c+1, so a key
// must not be shared between normal() and uniform01() callers.
inline double normal(std::uint64_t key, std::uint64_t counter) {
  const double u1 = uniform01(key, 2 * counter);
  const double u2 = uniform01(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Exponential with the given rate.
inline double exponential(std::uint64_t key, std::uint64_t counter, double rate) {
  return -std::log(uniform01(key, counter)) / rate;
}

}  // namespace rankdiff::rng
