#pragma once

#include <cstdint>
#include <vector>

#include "photoscreen/common/error.hpp"

namespace photoscreen::imaging {

// 8-bit RGB image, row-major interleaved triples.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size == width * height * 3

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {
    if (w < 1 || h < 1) throw ValidationError("image dimensions must be >= 1");
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  void validate() const {
    if (width < 1 || height < 1) throw ValidationError("image dimensions must be >= 1");
    if (pixels.size() != pixel_count() * 3) {
      throw ValidationError("pixel buffer size does not match dimensions");
    }
  }
};

// Rec. 601 luma plane used by the face detector.
inline std::vector<double> luminance_plane(const RgbImage& img) {
  std::vector<double> out(img.pixel_count());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const std::uint8_t* p = img.pixels.data() + i * 3;
    out[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

}  // namespace photoscreen::imaging
