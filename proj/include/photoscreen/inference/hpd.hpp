#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/linalg.hpp"

namespace photoscreen::inference {

// Shortest contiguous interval over the sorted samples containing
// ceil(level * n) of them. Ties resolve to the lowest starting index.
inline std::pair<double, double> hpd_interval(const Vec& samples, double level) {
  if (samples.size() < 10) throw ValidationError("hpd_interval needs at least 10 samples");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("hpd_interval: level must be in (0,1)");
  Vec sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t m = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  m = std::max<std::size_t>(1, std::min(m, n));

  std::size_t best = 0;
  double best_width = sorted[m - 1] - sorted[0];
  for (std::size_t i = 1; i + m <= n; ++i) {
    const double width = sorted[i + m - 1] - sorted[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {sorted[best], sorted[best + m - 1]};
}

// Grid of levels the tables report on: 30%..95% in 5% steps, then 99%.
inline const std::vector<double>& hpd_level_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int pct = 30; pct <= 95; pct += 5) g.push_back(pct / 100.0);
    g.push_back(0.99);
    return g;
  }();
  return grid;
}

// Largest grid level whose HPD interval excludes zero; 0 when even the
// smallest level contains it. Zero on an endpoint counts as contained.
inline double max_excluding_zero_level(const Vec& samples) {
  if (samples.size() < 10) {
    throw ValidationError("max_excluding_zero_level needs at least 10 samples");
  }
  const auto& grid = hpd_level_grid();
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const auto [lo, hi] = hpd_interval(samples, *it);
    if (lo > 0.0 || hi < 0.0) return *it;
  }
  return 0.0;
}

}  // namespace photoscreen::inference
