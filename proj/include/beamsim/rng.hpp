#pragma once

#include <cstdint>

namespace beamsim {

/// Deterministic 64-bit generator (splitmix64). Distributions are derived
/// arithmetically from raw draws so that streams are bit-identical across
/// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0,1)
    return lo + (hi - lo) * u;
  }

  /// Independent child stream: mixes a stream id into the seed so that e.g.
  /// the oscillation draw and the estimator restarts never share a sequence.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0xd1b54a32d192ed03ull * (stream + 1)));
    return r.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace beamsim
