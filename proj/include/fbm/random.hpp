#pragma once

#include <cstdint>
#include <stdexcept>

namespace fbm {

/// Marsaglia xorshift64. Cross-implementation reproducible: the sequence is
/// fully determined by the seed, and the raw 64-bit states are the outputs.
class Xorshift64 {
 public:
  static constexpr std::uint64_t kDefaultSeed = 88172645463325252ull;

  explicit Xorshift64(std::uint64_t seed) : state_(seed) {
    if (seed == 0) {
      throw std::invalid_argument("Xorshift64: seed must be nonzero");
    }
  }

  std::uint64_t next() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return state_;
  }

  /// Next value reduced to [0, n). Plain modulo; n is tiny relative to 2^64
  /// everywhere this generator is used, so the bias is irrelevant.
  std::uint64_t uniform(std::uint64_t n) { return next() % n; }

  /// Next value reduced to [-half, half] for a window of 2*half+1 integers.
  int uniform_offset(int half) {
    return static_cast<int>(uniform(2 * static_cast<std::uint64_t>(half) + 1)) -
           half;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fbm
