#pragma once

// Seeded randomness that produces the same numbers on every platform.
//
// std::mt19937_64 is fully specified by the standard, but the std::*
// distributions are not, so the conversions to doubles and bounded integers
// are done here. Independent streams are derived from one user seed with
// SplitMix64 so that adding draws to one stream never shifts another.

#include <cstdint>
#include <random>

namespace attestgame {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of sub-stream `stream` of the user seed `seed`.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed,
                                           std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

__extension__ typedef unsigned __int128 Uint128;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(derive_stream_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the closed interval [low, high]; low == high returns low.
  double uniform(double low, double high) {
    if (low == high) return low;
    const double x = low + (high - low) * uniform01();
    return x > high ? high : x;
  }

  // Uniform integer in [0, bound), bound > 0 (Lemire's rejection method).
  std::uint64_t below(std::uint64_t bound) {
    Uint128 m = static_cast<Uint128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<Uint128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace attestgame
