#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace hlob {

/// All randomness in the library comes from std::mt19937_64. Independent
/// streams of one run are seeded with splitmix64(seed + stream index).
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class RngStream : std::uint64_t {
  OrderFlow = 0,
  Cancellation = 1,
  Placement = 2,
  Preroll = 3,
};

inline Rng make_rng(std::uint64_t seed, RngStream stream = RngStream::OrderFlow) {
  return Rng{splitmix64(seed + static_cast<std::uint64_t>(stream))};
}

/// Uniform on (0, 1], 53 random bits.
inline double uniform_open0(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Exponential variate with the given rate, by inversion.
inline double exponential(Rng& rng, double rate) {
  return -std::log(uniform_open0(rng)) / rate;
}

}  // namespace hlob
