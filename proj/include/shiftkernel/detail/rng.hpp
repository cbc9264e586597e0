// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace shiftkernel::detail {

// Counter-based generator: every (seed, stream, index) triple maps to the
// same value on every platform, so parallel draws and reruns are bit-stable.
class Splitmix64 {
 public:
  explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, bound) without modulo bias worth caring about here.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Splitmix64 g(seed ^ (0x632BE59BD9B4E019ULL * (stream + 1)));
  return g.next_u64();
}

// Independent generator for (seed, stream); streams keep sample draws for
// different purposes (inputs, noise, anchors) from aliasing each other.
inline Splitmix64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Splitmix64(mix_seed(seed, stream));
}

}  // namespace shiftkernel::detail
