#include "fbm/features.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "fbm/errors.hpp"

namespace fbm {

namespace {

// Radius-3 Bresenham circle, clockwise from 12 o'clock.
constexpr int kCircle = 16;
constexpr int kArcMin = 9;
constexpr int kCircleDx[kCircle] = {0, 1, 2, 3, 3, 3, 2, 1,
                                    0, -1, -2, -3, -3, -3, -2, -1};
constexpr int kCircleDy[kCircle] = {-3, -3, -2, -1, 0, 1, 2, 3,
                                    3, 3, 2, 1, 0, -1, -2, -3};

struct Arc {
  int start = 0;
  int length = 0;
};

// Longest circular run of set bits in a 16-bit mask. Runs of >= kArcMin
// cannot tie (two disjoint such runs would need 18 positions), so the
// qualifying arc is unique whenever one exists.
Arc longest_run(unsigned mask) {
  if (mask == 0xFFFFu) {
    return {0, kCircle};
  }
  const std::uint32_t doubled = mask | (mask << kCircle);
  Arc best;
  int run = 0;
  for (int i = 0; i < 2 * kCircle; ++i) {
    if ((doubled >> i) & 1u) {
      ++run;
      if (run > best.length) {
        best = {i - run + 1, run};
      }
    } else {
      run = 0;
    }
  }
  best.length = std::min(best.length, kCircle);
  return best;
}

}  // namespace

std::vector<Keypoint> detect_fast(const GrayImage& img, int threshold,
                                  std::size_t max_keypoints) {
  if (img.width < 33 || img.height < 33) {
    throw std::invalid_argument("detect_fast: image too small (min 33x33)");
  }
  if (threshold < 1) {
    throw std::invalid_argument("detect_fast: threshold must be >= 1");
  }

  // Score map doubles as the candidate set: a qualifying arc sums at least
  // 9 terms of |diff| > threshold >= 1, so any candidate scores nonzero.
  std::vector<std::uint32_t> score(img.data.size(), 0);
  auto score_at = [&](int x, int y) -> std::uint32_t& {
    return score[static_cast<std::size_t>(y) * img.width + x];
  };

  for (int y = 3; y < img.height - 3; ++y) {
    for (int x = 3; x < img.width - 3; ++x) {
      const int center = img.at(x, y);
      const int hi = center + threshold;
      const int lo = center - threshold;
      unsigned bright = 0;
      unsigned dark = 0;
      int circle[kCircle];
      for (int i = 0; i < kCircle; ++i) {
        const int v = img.at(x + kCircleDx[i], y + kCircleDy[i]);
        circle[i] = v;
        bright |= static_cast<unsigned>(v > hi) << i;
        dark |= static_cast<unsigned>(v < lo) << i;
      }

      Arc arc = longest_run(bright);
      if (arc.length < kArcMin) {
        arc = longest_run(dark);
      }
      if (arc.length < kArcMin) {
        continue;
      }
      std::uint32_t s = 0;
      for (int i = 0; i < arc.length; ++i) {
        s += static_cast<std::uint32_t>(
            std::abs(circle[(arc.start + i) % kCircle] - center));
      }
      score_at(x, y) = s;
    }
  }

  // 3x3 non-max suppression; equal scores keep the smaller (y, x).
  std::vector<Keypoint> kps;
  for (int y = 3; y < img.height - 3; ++y) {
    for (int x = 3; x < img.width - 3; ++x) {
      const std::uint32_t s = score_at(x, y);
      if (s == 0) continue;
      bool maximal = true;
      for (int dy = -1; dy <= 1 && maximal; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const std::uint32_t n = score_at(x + dx, y + dy);
          if (n > s || (n == s && (dy < 0 || (dy == 0 && dx < 0)))) {
            maximal = false;
            break;
          }
        }
      }
      if (maximal && x >= kBorderMargin && x < img.width - kBorderMargin &&
          y >= kBorderMargin && y < img.height - kBorderMargin) {
        kps.push_back({x, y, s});
      }
    }
  }

  std::stable_sort(kps.begin(), kps.end(),
                   [](const Keypoint& a, const Keypoint& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.y != b.y) return a.y < b.y;
                     return a.x < b.x;
                   });
  if (kps.size() > max_keypoints) {
    kps.resize(max_keypoints);
  }
  return kps;
}

SamplingPattern make_pattern(std::uint64_t seed) {
  Xorshift64 rng(seed);  // rejects the degenerate zero seed
  SamplingPattern pattern;
  for (auto& test : pattern.tests) {
    test.ax = static_cast<std::int8_t>(rng.uniform_offset(13));
    test.ay = static_cast<std::int8_t>(rng.uniform_offset(13));
    test.bx = static_cast<std::int8_t>(rng.uniform_offset(13));
    test.by = static_cast<std::int8_t>(rng.uniform_offset(13));
  }
  return pattern;
}

BinaryDescriptor describe(const GrayImage& smoothed, const Keypoint& kp,
                          const SamplingPattern& pattern) {
  if (kp.x < kBorderMargin || kp.x >= smoothed.width - kBorderMargin ||
      kp.y < kBorderMargin || kp.y >= smoothed.height - kBorderMargin) {
    throw std::invalid_argument("describe: keypoint violates border margin");
  }
  BinaryDescriptor desc;
  for (int i = 0; i < BinaryDescriptor::kBits; ++i) {
    const PatternTest& t = pattern.tests[i];
    const std::uint8_t a = smoothed.at(kp.x + t.ax, kp.y + t.ay);
    const std::uint8_t b = smoothed.at(kp.x + t.bx, kp.y + t.by);
    if (a < b) {
      desc.set(i);
    }
  }
  return desc;
}

int hamming_bits(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  int bits = 0;
  for (int w = 0; w < BinaryDescriptor::kWords; ++w) {
    bits += std::popcount(a.words()[w] ^ b.words()[w]);
  }
  return bits;
}

double agreement_ratio(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  // Dyadic denominator keeps this exact: hamming + 256 * ratio == 256.
  return 1.0 - hamming_bits(a, b) / 256.0;
}

std::array<std::uint8_t, BinaryDescriptor::kBytes> BinaryDescriptor::to_bytes()
    const {
  std::array<std::uint8_t, kBytes> bytes{};
  for (int j = 0; j < kBytes; ++j) {
    bytes[j] = static_cast<std::uint8_t>(words_[j >> 3] >> ((j & 7) * 8));
  }
  return bytes;
}

BinaryDescriptor BinaryDescriptor::from_bytes(
    std::span<const std::uint8_t, kBytes> bytes) {
  BinaryDescriptor desc;
  for (int j = 0; j < kBytes; ++j) {
    desc.words_[j >> 3] |= std::uint64_t{bytes[j]} << ((j & 7) * 8);
  }
  return desc;
}

BinaryDescriptor BinaryDescriptor::operator~() const {
  BinaryDescriptor desc;
  for (int w = 0; w < kWords; ++w) {
    desc.words_[w] = ~words_[w];
  }
  return desc;
}

namespace {

constexpr char kDescriptorMagic[4] = {'B', 'D', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
         std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace

void write_descriptors(const std::filesystem::path& path,
                       std::span<const Keypoint> keypoints,
                       std::span<const BinaryDescriptor> descriptors) {
  if (keypoints.size() != descriptors.size()) {
    throw std::invalid_argument(
        "write_descriptors: keypoint/descriptor count mismatch");
  }
  std::string out;
  out.append(kDescriptorMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(keypoints.size()));
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(keypoints[i].x));
    put_u32(out, static_cast<std::uint32_t>(keypoints[i].y));
    put_u32(out, keypoints[i].score);
    const auto bytes = descriptors[i].to_bytes();
    out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw DataError(path.string() + ": cannot open for writing");
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw DataError(path.string() + ": write failed");
  }
}

std::pair<std::vector<Keypoint>, std::vector<BinaryDescriptor>>
read_descriptors(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw DataError(path.string() + ": cannot open");
  }
  std::string buf((std::istreambuf_iterator<char>(file)),
                  std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data());

  if (buf.size() < 8 || std::memcmp(buf.data(), kDescriptorMagic, 4) != 0) {
    throw DataError(path.string() + ": not a descriptor file");
  }
  const std::uint32_t count = get_u32(p + 4);
  constexpr std::size_t kRecord = 4 + 4 + 4 + BinaryDescriptor::kBytes;
  if (buf.size() != 8 + static_cast<std::size_t>(count) * kRecord) {
    throw DataError(path.string() + ": truncated or oversized descriptor file");
  }

  std::vector<Keypoint> kps;
  std::vector<BinaryDescriptor> descs;
  kps.reserve(count);
  descs.reserve(count);
  const std::uint8_t* rec = p + 8;
  for (std::uint32_t i = 0; i < count; ++i, rec += kRecord) {
    Keypoint kp;
    kp.x = static_cast<std::int32_t>(get_u32(rec));
    kp.y = static_cast<std::int32_t>(get_u32(rec + 4));
    kp.score = get_u32(rec + 8);
    kps.push_back(kp);
    descs.push_back(BinaryDescriptor::from_bytes(
        std::span<const std::uint8_t, BinaryDescriptor::kBytes>(
            rec + 12, BinaryDescriptor::kBytes)));
  }
  return {std::move(kps), std::move(descs)};
}

}  // namespace fbm
