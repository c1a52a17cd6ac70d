#pragma once

// Counter-based splittable pseudo-random generator.
//
// Each stream is addressed by (master_seed, stream_index) and produces the
// 64-bit sequence
//     out_k = mix64(base + (k+1) * GAMMA),   k = 0, 1, 2, ...
// where mix64 is the SplitMix64 finalizer and base is a hash of the stream
// address.  Draw k depends only on the address and the counter, so trials can
// be assigned one stream each and run in any order (or in parallel) while
// reproducing the exact same bytes.

#include <cmath>
#include <complex>
#include <cstdint>

namespace permlaw {

class RngStream {
 public:
  // SplitMix64 constants (Steele, Lea, Flood 2014).
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kMixA = 0xBF58476D1CE4E5B9ull;
  static constexpr std::uint64_t kMixB = 0x94D049BB133111EBull;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {
    base_ = mix64(master_seed + kGamma) ^ mix64(stream_index * kMixA + kMixB);
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * kMixA;
    z = (z ^ (z >> 27)) * kMixB;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(base_ + counter_ * kGamma);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound) by rejection of the incomplete last cycle.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = (UINT64_MAX / bound) * bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r < limit) return r % bound;
    }
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Complex normal with E|g|^2 = 1 (real and imaginary parts N(0, 1/2)).
  std::complex<double> complex_normal() {
    const double s = 0.70710678118654752440084436210485;  // 1/sqrt(2)
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace permlaw
