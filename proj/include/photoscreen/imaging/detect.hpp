#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

#include "photoscreen/imaging/cascade.hpp"
#include "photoscreen/imaging/image.hpp"
#include "photoscreen/imaging/integral.hpp"

namespace photoscreen::imaging {

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Box&) const = default;
};

inline double iou(const Box& a, const Box& b) {
  const int x1 = std::max(a.x, b.x);
  const int y1 = std::max(a.y, b.y);
  const int x2 = std::min(a.x + a.w, b.x + b.w);
  const int y2 = std::min(a.y + a.h, b.y + b.h);
  const double inter = static_cast<double>(std::max(0, x2 - x1)) * std::max(0, y2 - y1);
  if (inter <= 0.0) return 0.0;
  const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
  return inter / uni;
}

namespace detail {

// Overlap threshold for neighbor grouping and cross-pass duplicate collapse.
inline constexpr double kGroupIou = 0.3;
// Windows flatter than this pixel-value standard deviation are rejected.
inline constexpr double kMinWindowStddev = 1.0;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline Box mean_box(const std::vector<Box>& members) {
  double sx = 0, sy = 0, sw = 0, sh = 0;
  for (const Box& b : members) {
    sx += b.x;
    sy += b.y;
    sw += b.w;
    sh += b.h;
  }
  const double n = static_cast<double>(members.size());
  return {static_cast<int>(std::lround(sx / n)), static_cast<int>(std::lround(sy / n)),
          static_cast<int>(std::lround(sw / n)), static_cast<int>(std::lround(sh / n))};
}

// One sliding-window pass over the scale pyramid for a single scale factor.
inline std::vector<Box> scan_pass(const IntegralImage& sat, const IntegralImage& sat_sq,
                                  const CascadeModel& cascade, double factor) {
  std::vector<Box> raw;
  const int img_w = sat.width();
  const int img_h = sat.height();
  for (double scale = 1.0;; scale *= factor) {
    const int win_w = static_cast<int>(std::lround(cascade.window_width * scale));
    const int win_h = static_cast<int>(std::lround(cascade.window_height * scale));
    if (win_w > img_w || win_h > img_h) break;
    const int step = std::max(1, static_cast<int>(std::lround(scale)));
    const double area = static_cast<double>(win_w) * win_h;
    for (int y = 0; y + win_h <= img_h; y += step) {
      for (int x = 0; x + win_w <= img_w; x += step) {
        const double mean = sat.rect_sum(x, y, win_w, win_h) / area;
        const double var = sat_sq.rect_sum(x, y, win_w, win_h) / area - mean * mean;
        const double stddev = std::sqrt(std::max(0.0, var));
        if (stddev < kMinWindowStddev) continue;  // flat window

        bool passed = true;
        for (const CascadeStage& stage : cascade.stages) {
          double stage_sum = 0.0;
          for (const WeakClassifier& weak : stage.weak) {
            double feature = 0.0;
            for (const HaarRect& r : weak.rects) {
              const int rx = x + static_cast<int>(std::lround(r.x * scale));
              const int ry = y + static_cast<int>(std::lround(r.y * scale));
              int rw = static_cast<int>(std::lround(r.w * scale));
              int rh = static_cast<int>(std::lround(r.h * scale));
              rw = std::min(rw, x + win_w - rx);
              rh = std::min(rh, y + win_h - ry);
              feature += r.weight * sat.rect_sum(rx, ry, rw, rh);
            }
            feature /= area * stddev;
            stage_sum += (feature < weak.threshold) ? weak.left : weak.right;
          }
          if (stage_sum < stage.threshold) {
            passed = false;
            break;
          }
        }
        if (passed) raw.push_back({x, y, win_w, win_h});
      }
    }
  }
  return raw;
}

// Cluster raw hits by IoU, keep clusters with enough neighbors, average each
// cluster into one candidate box.
inline std::vector<Box> group_hits(const std::vector<Box>& raw, const DetectionParams& params) {
  if (raw.empty()) return {};
  UnionFind uf(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      if (iou(raw[i], raw[j]) >= kGroupIou) uf.unite(static_cast<int>(i), static_cast<int>(j));
    }
  }
  std::vector<std::vector<Box>> clusters(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    clusters[uf.find(static_cast<int>(i))].push_back(raw[i]);
  }
  std::vector<Box> out;
  for (const auto& members : clusters) {
    if (static_cast<int>(members.size()) < std::max(1, params.min_neighbors)) continue;
    const Box b = mean_box(members);
    if (b.w >= params.min_width && b.h >= params.min_height) out.push_back(b);
  }
  return out;
}

}  // namespace detail

// Two-pass multi-scale cascade detection. Each scale factor runs its own
// sliding-window pass; per-pass hits are neighbor-grouped, then boxes that
// duplicate each other across passes (IoU >= 0.3) collapse to their mean.
// Output is sorted by (y, x, w, h) and fully determined by the inputs.
inline std::vector<Box> detect_faces(const RgbImage& image, const CascadeModel& cascade,
                                     const DetectionParams& params = {}) {
  params.validate();
  image.validate();
  if (cascade.stages.empty()) throw ValidationError("cascade has no stages");

  const std::vector<double> luma = luminance_plane(image);
  std::vector<double> luma_sq(luma.size());
  for (std::size_t i = 0; i < luma.size(); ++i) luma_sq[i] = luma[i] * luma[i];
  const IntegralImage sat(luma, image.width, image.height);
  const IntegralImage sat_sq(luma_sq, image.width, image.height);

  std::vector<Box> merged;
  std::vector<int> pass_of;
  for (std::size_t p = 0; p < params.scale_factors.size(); ++p) {
    const auto raw = detail::scan_pass(sat, sat_sq, cascade, params.scale_factors[p]);
    for (const Box& b : detail::group_hits(raw, params)) {
      merged.push_back(b);
      pass_of.push_back(static_cast<int>(p));
    }
  }

  // collapse cross-pass duplicates
  detail::UnionFind uf(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (std::size_t j = i + 1; j < merged.size(); ++j) {
      if (pass_of[i] != pass_of[j] && iou(merged[i], merged[j]) >= detail::kGroupIou) {
        uf.unite(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  std::vector<std::vector<Box>> components(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    components[uf.find(static_cast<int>(i))].push_back(merged[i]);
  }
  std::vector<Box> out;
  for (const auto& members : components) {
    if (!members.empty()) out.push_back(detail::mean_box(members));
  }
  std::sort(out.begin(), out.end(), [](const Box& a, const Box& b) {
    return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
  });
  return out;
}

}  // namespace photoscreen::imaging
