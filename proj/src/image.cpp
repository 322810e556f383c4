#include "fbm/image.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>

#include "fbm/errors.hpp"

namespace fbm {

namespace {

// Token reader over a Netpbm header/plain payload: skips whitespace and
// '#'-to-end-of-line comments.
class PnmReader {
 public:
  PnmReader(const std::string& buf, std::string filename)
      : buf_(buf), name_(std::move(filename)) {}

  std::string next_token() {
    skip_separators();
    if (pos_ >= buf_.size()) {
      throw DataError(name_ + ": truncated header");
    }
    std::size_t start = pos_;
    while (pos_ < buf_.size() && !is_space(buf_[pos_]) && buf_[pos_] != '#') {
      ++pos_;
    }
    return buf_.substr(start, pos_ - start);
  }

  int next_int(const char* what) {
    const std::string tok = next_token();
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw DataError(name_ + ": expected " + std::string(what) + ", got '" +
                      tok + "'");
    }
    if (used != tok.size() || value < 0) {
      throw DataError(name_ + ": expected " + std::string(what) + ", got '" +
                      tok + "'");
    }
    return value;
  }

  // Binary payload starts after exactly one whitespace byte.
  std::size_t binary_payload_offset() {
    if (pos_ >= buf_.size() || !is_space(buf_[pos_])) {
      throw DataError(name_ + ": missing whitespace before binary payload");
    }
    return pos_ + 1;
  }

  const std::string& name() const { return name_; }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
           c == '\f';
  }

  void skip_separators() {
    while (pos_ < buf_.size()) {
      if (is_space(buf_[pos_])) {
        ++pos_;
      } else if (buf_[pos_] == '#') {
        while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::uint8_t luma(int r, int g, int b) {
  // Integer-only conversion; the constants sum to 256 so white stays 255.
  return static_cast<std::uint8_t>((77 * r + 150 * g + 29 * b) >> 8);
}

}  // namespace

GrayImage make_image(int width, int height, std::uint8_t fill) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("make_image: dimensions must be positive");
  }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(path.string() + ": cannot open");
  }
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  PnmReader reader(buf, path.string());

  const std::string magic = reader.next_token();
  const bool color = magic == "P3" || magic == "P6";
  const bool binary = magic == "P5" || magic == "P6";
  if (magic != "P2" && magic != "P5" && !color) {
    throw DataError(path.string() + ": unknown magic number '" + magic + "'");
  }

  const int width = reader.next_int("width");
  const int height = reader.next_int("height");
  if (width == 0 || height == 0) {
    throw DataError(path.string() + ": zero image dimension");
  }
  const int maxval = reader.next_int("maxval");
  if (maxval == 0 || maxval > 255) {
    throw DataError(path.string() + ": unsupported maxval " +
                    std::to_string(maxval));
  }

  GrayImage img = make_image(width, height);
  const std::size_t pixels = img.data.size();
  const int channels = color ? 3 : 1;

  if (binary) {
    const std::size_t offset = reader.binary_payload_offset();
    const std::size_t need = pixels * channels;
    if (buf.size() - offset < need) {
      throw DataError(path.string() + ": truncated payload");
    }
    const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data() + offset);
    if (color) {
      for (std::size_t i = 0; i < pixels; ++i, p += 3) {
        if (p[0] > maxval || p[1] > maxval || p[2] > maxval) {
          throw DataError(path.string() + ": sample exceeds maxval");
        }
        img.data[i] = luma(p[0], p[1], p[2]);
      }
    } else {
      for (std::size_t i = 0; i < pixels; ++i, ++p) {
        if (*p > maxval) {
          throw DataError(path.string() + ": sample exceeds maxval");
        }
        img.data[i] = *p;
      }
    }
  } else {
    auto next_sample = [&]() {
      const int v = reader.next_int("sample");
      if (v > maxval) {
        throw DataError(path.string() + ": sample exceeds maxval");
      }
      return v;
    };
    for (std::size_t i = 0; i < pixels; ++i) {
      if (color) {
        const int r = next_sample();
        const int g = next_sample();
        const int b = next_sample();
        img.data[i] = luma(r, g, b);
      } else {
        img.data[i] = static_cast<std::uint8_t>(next_sample());
      }
    }
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError(path.string() + ": cannot open for writing");
  }
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) {
    throw DataError(path.string() + ": write failed");
  }
}

GrayImage box_smooth(const GrayImage& img) {
  constexpr int kRadius = 2;
  constexpr int kWindow = 2 * kRadius + 1;
  constexpr int kArea = kWindow * kWindow;
  if (img.width < kWindow || img.height < kWindow) {
    throw std::invalid_argument("box_smooth: image smaller than 5x5");
  }

  // Integral image over the clamp-extended raster, one window sum per
  // output pixel regardless of window size.
  const int ew = img.width + 2 * kRadius;
  const int eh = img.height + 2 * kRadius;
  std::vector<std::uint64_t> integral(
      static_cast<std::size_t>(ew + 1) * (eh + 1), 0);
  auto s = [&](int x, int y) -> std::uint64_t& {
    return integral[static_cast<std::size_t>(y) * (ew + 1) + x];
  };
  for (int y = 0; y < eh; ++y) {
    const int sy = std::clamp(y - kRadius, 0, img.height - 1);
    for (int x = 0; x < ew; ++x) {
      const int sx = std::clamp(x - kRadius, 0, img.width - 1);
      s(x + 1, y + 1) = img.at(sx, sy) + s(x, y + 1) + s(x + 1, y) - s(x, y);
    }
  }

  GrayImage out = make_image(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::uint64_t sum =
          s(x + kWindow, y + kWindow) - s(x, y + kWindow) - s(x + kWindow, y) +
          s(x, y);
      out.at(x, y) = static_cast<std::uint8_t>(sum / kArea);
    }
  }
  return out;
}

}  // namespace fbm
