#pragma once

#include <cstdint>

namespace parakernel {

/// splitmix64: 64-bit state, one multiply-xor-shift avalanche per draw.
/// Streams are derived from (seed, stream index) so path ensembles are
/// reproducible independently of scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform01() {  // in (0, 1]
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mixStream(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL));
  g();
  return g();
}

/// Box-Muller pairs over a SplitMix64 stream.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t streamSeed) : rng_(streamSeed) {}

  double next() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform01();
    const double u2 = rng_.uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = mag * std::sin(ang);
    haveSpare_ = true;
    return mag * std::cos(ang);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool haveSpare_ = false;
};

}  // namespace parakernel
