#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fbm/features.hpp"
#include "fbm/image.hpp"
#include "fbm/random.hpp"

namespace testutil {

// Scratch mt19937-based helpers: test data generation stays independent of
// the library's own xorshift stream.
inline fbm::BinaryDescriptor random_descriptor(std::mt19937_64& rng) {
  fbm::BinaryDescriptor d;
  for (int bit = 0; bit < fbm::BinaryDescriptor::kBits; ++bit) {
    if (rng() & 1u) {
      d.set(bit);
    }
  }
  return d;
}

// Copy of `base` with exactly k distinct bits flipped.
inline fbm::BinaryDescriptor flip_k_bits(const fbm::BinaryDescriptor& base,
                                         int k, std::mt19937_64& rng) {
  fbm::BinaryDescriptor d = base;
  std::vector<int> positions(fbm::BinaryDescriptor::kBits);
  for (int i = 0; i < fbm::BinaryDescriptor::kBits; ++i) positions[i] = i;
  std::shuffle(positions.begin(), positions.end(), rng);
  for (int i = 0; i < k; ++i) {
    d.flip(positions[i]);
  }
  return d;
}

// Naive per-bit count, the oracle hamming_bits is checked against.
inline int hamming_oracle(const fbm::BinaryDescriptor& a,
                          const fbm::BinaryDescriptor& b) {
  int count = 0;
  for (int bit = 0; bit < fbm::BinaryDescriptor::kBits; ++bit) {
    count += a.test(bit) != b.test(bit) ? 1 : 0;
  }
  return count;
}

inline fbm::GrayImage noise_image(int width, int height, std::uint64_t seed) {
  fbm::GrayImage img = fbm::make_image(width, height);
  std::mt19937_64 rng(seed);
  for (auto& px : img.data) {
    px = static_cast<std::uint8_t>(rng() & 0xFF);
  }
  return img;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace testutil
