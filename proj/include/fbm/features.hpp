#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "fbm/image.hpp"
#include "fbm/random.hpp"

namespace fbm {

/// Keypoints closer than this to any image edge are discarded: room for the
/// 31x31 descriptor patch plus the detection ring.
inline constexpr int kBorderMargin = 16;

struct Keypoint {
  int x = 0;
  int y = 0;
  std::uint32_t score = 0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// 256-bit descriptor packed into four 64-bit words, bit k at
/// words[k / 64] >> (k % 64). Serialized byte j carries bits 8j..8j+7 with
/// bit i of byte j being descriptor bit 8j+i; that layout is normative for
/// descriptor files.
class BinaryDescriptor {
 public:
  static constexpr int kBits = 256;
  static constexpr int kBytes = 32;
  static constexpr int kWords = 4;

  bool test(int bit) const {
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  void set(int bit, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (bit & 63);
    if (value) {
      words_[bit >> 6] |= mask;
    } else {
      words_[bit >> 6] &= ~mask;
    }
  }
  void flip(int bit) { words_[bit >> 6] ^= std::uint64_t{1} << (bit & 63); }

  const std::array<std::uint64_t, kWords>& words() const { return words_; }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static BinaryDescriptor from_bytes(std::span<const std::uint8_t, kBytes> bytes);

  BinaryDescriptor operator~() const;

  friend bool operator==(const BinaryDescriptor&,
                         const BinaryDescriptor&) = default;

 private:
  std::array<std::uint64_t, kWords> words_{};
};

/// One intensity comparison of the sampling pattern: descriptor bit is 1 iff
/// I(kp + a) < I(kp + b).
struct PatternTest {
  std::int8_t ax = 0;
  std::int8_t ay = 0;
  std::int8_t bx = 0;
  std::int8_t by = 0;

  friend bool operator==(const PatternTest&, const PatternTest&) = default;
};

struct SamplingPattern {
  std::array<PatternTest, BinaryDescriptor::kBits> tests{};

  friend bool operator==(const SamplingPattern&,
                         const SamplingPattern&) = default;
};

inline constexpr std::uint64_t kDefaultPatternSeed = Xorshift64::kDefaultSeed;

/// FAST segment test on the 16-pixel radius-3 circle: a corner needs >= 9
/// contiguous circle pixels all brighter than center+threshold or all darker
/// than center-threshold. Score is the sum of |I(circle) - I(center)| over
/// the qualifying arc. 3x3 non-max suppression on score (ties go to the
/// smaller (y, x)), then results are sorted by descending score, filtered to
/// the border margin, and truncated to max_keypoints.
/// Requires an image of at least 33x33 and threshold >= 1.
std::vector<Keypoint> detect_fast(const GrayImage& img, int threshold,
                                  std::size_t max_keypoints);

/// Deterministic sampling pattern: the 1024 coordinates (ax, ay, bx, by per
/// test, in test order) are drawn from Xorshift64 as (next() % 27) - 13.
SamplingPattern make_pattern(std::uint64_t seed = kDefaultPatternSeed);

/// BRIEF-style description on a smoothed image; bit i = 1 iff
/// I(kp + a_i) < I(kp + b_i) (strict; ties give 0). The keypoint must satisfy
/// the border margin.
BinaryDescriptor describe(const GrayImage& smoothed, const Keypoint& kp,
                          const SamplingPattern& pattern);

/// Number of differing bit positions (f01 + f10), in [0, 256].
int hamming_bits(const BinaryDescriptor& a, const BinaryDescriptor& b);

/// Fraction of agreeing positions, (f11 + f00) / 256. Exact in doubles:
/// hamming_bits(a, b) + 256 * agreement_ratio(a, b) == 256.
double agreement_ratio(const BinaryDescriptor& a, const BinaryDescriptor& b);

/// Descriptor file: magic "BD01", u32le count, then per record
/// i32le x, i32le y, u32le score, 32 descriptor bytes.
void write_descriptors(const std::filesystem::path& path,
                       std::span<const Keypoint> keypoints,
                       std::span<const BinaryDescriptor> descriptors);
std::pair<std::vector<Keypoint>, std::vector<BinaryDescriptor>>
read_descriptors(const std::filesystem::path& path);

}  // namespace fbm
