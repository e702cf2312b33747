#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "photoscreen/imaging/image.hpp"

namespace photoscreen::imaging {

// Hexcone HSV. hue in [0,1) (degrees/360), saturation and value in [0,1].
// Achromatic pixels are given the canonical hue 0 so that means stay
// deterministic.
struct HsvTriple {
  double hue = 0.0;
  double saturation = 0.0;
  double value = 0.0;
};

inline HsvTriple rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;

  HsvTriple hsv;
  hsv.value = mx / 255.0;
  hsv.saturation = (mx == 0.0) ? 0.0 : delta / mx;
  if (delta == 0.0) {
    hsv.hue = 0.0;
    return hsv;
  }
  double h;
  if (mx == r) {
    h = (g - b) / delta;
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / delta + 2.0;
  } else {
    h = (r - g) / delta + 4.0;
  }
  hsv.hue = h / 6.0;
  if (hsv.hue >= 1.0) hsv.hue -= 1.0;
  return hsv;
}

// Inverse hexcone mapping, channels in [0,255].
inline std::array<double, 3> hsv_to_rgb(const HsvTriple& hsv) {
  const double v = hsv.value * 255.0;
  if (hsv.saturation == 0.0) return {v, v, v};
  const double h6 = hsv.hue * 6.0;
  const int i = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1.0 - hsv.saturation);
  const double q = v * (1.0 - hsv.saturation * f);
  const double t = v * (1.0 - hsv.saturation * (1.0 - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

struct MeanHsv {
  double mean_hue = 0.0;
  double mean_saturation = 0.0;
  double mean_brightness = 0.0;
};

// Pixel-level HSV averages. Hue is averaged linearly as a scalar on the
// red-to-blue axis, not circularly; photos that straddle the hue wrap-around
// (magenta/red boundary) will pull the mean toward the middle of the range.
inline MeanHsv mean_hsv(const RgbImage& img) {
  img.validate();
  // extended-precision accumulation keeps constant images bit-exact
  long double sh = 0.0L, ss = 0.0L, sv = 0.0L;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const std::uint8_t* p = img.pixels.data() + i * 3;
    const HsvTriple hsv = rgb_to_hsv(p[0], p[1], p[2]);
    sh += hsv.hue;
    ss += hsv.saturation;
    sv += hsv.value;
  }
  const long double n = static_cast<long double>(img.pixel_count());
  return {static_cast<double>(sh / n), static_cast<double>(ss / n),
          static_cast<double>(sv / n)};
}

}  // namespace photoscreen::imaging
