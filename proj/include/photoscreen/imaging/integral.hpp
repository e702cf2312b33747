#pragma once

#include <cstddef>
#include <vector>

#include "photoscreen/common/error.hpp"

namespace photoscreen::imaging {

// Summed-area table over a luminance plane. sum_at(x,y) is the inclusive sum
// of the rectangle from the origin to (x,y); any rectangle sum costs four
// lookups.
class IntegralImage {
 public:
  IntegralImage(const std::vector<double>& plane, int width, int height)
      : width_(width), height_(height), table_((width + 1) * (height + 1), 0.0) {
    if (width < 1 || height < 1) throw ValidationError("integral image needs width/height >= 1");
    if (plane.size() != static_cast<std::size_t>(width) * height) {
      throw ValidationError("plane size does not match dimensions");
    }
    const int w1 = width_ + 1;
    for (int y = 0; y < height_; ++y) {
      double row = 0.0;
      for (int x = 0; x < width_; ++x) {
        row += plane[static_cast<std::size_t>(y) * width_ + x];
        table_[(y + 1) * w1 + (x + 1)] = table_[y * w1 + (x + 1)] + row;
      }
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }

  // inclusive sum of the origin-anchored rectangle with bottom-right (x,y)
  double sum_at(int x, int y) const { return table_[(y + 1) * (width_ + 1) + (x + 1)]; }

  // sum over [x, x+w) x [y, y+h)
  double rect_sum(int x, int y, int w, int h) const {
    const int w1 = width_ + 1;
    return table_[(y + h) * w1 + (x + w)] - table_[y * w1 + (x + w)] -
           table_[(y + h) * w1 + x] + table_[y * w1 + x];
  }

 private:
  int width_;
  int height_;
  std::vector<double> table_;
};

}  // namespace photoscreen::imaging
