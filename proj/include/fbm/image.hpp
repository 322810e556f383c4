#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace fbm {

/// Row-major 8-bit grayscale raster. Immutable by convention after
/// construction; all pipeline stages take it by const reference.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size == width * height

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

/// Allocate a width x height image filled with `fill`.
GrayImage make_image(int width, int height, std::uint8_t fill = 0);

/// Load a Netpbm image (P2/P5 graymap, P3/P6 pixmap), maxval <= 255.
/// Color input is reduced with integer luma (77*R + 150*G + 29*B) >> 8.
/// Header comments (# to end of line) are skipped. Throws DataError on
/// unknown magic, truncation, maxval > 255, or zero dimensions.
GrayImage load_image(const std::filesystem::path& path);

/// Write as binary PGM (P5, maxval 255). Round-trips bit-exactly through
/// load_image.
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// 5x5 box mean with truncating division; out-of-bounds neighbors clamp to
/// the nearest edge pixel. Backed by an integral image, so the cost per
/// pixel does not depend on the window size. Requires width, height >= 5.
GrayImage box_smooth(const GrayImage& img);

}  // namespace fbm
