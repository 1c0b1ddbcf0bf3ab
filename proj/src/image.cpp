#include "mode/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mode {

size_t ValidityMask::count_valid() const {
  return static_cast<size_t>(std::count(data.begin(), data.end(), 1));
}

ValidityMask mask_and(const ValidityMask& a, const ValidityMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mask_and: dimensions differ");
  ValidityMask out(a.width, a.height, false);
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (a.data[i] && b.data[i]) ? 1 : 0;
  return out;
}

namespace {

struct TapSet {
  int r0, r1, c0, c1;
  double fr, fc;  // interpolation fractions toward r1/c1
};

inline int wrap_index(int i, int n) {
  int m = i % n;
  if (m < 0) m += n;
  return m;
}

TapSet make_taps(int width, int height, const PixelCoord& p, WrapAxis wrap) {
  TapSet t{};
  const double cf = std::floor(p.col);
  const double rf = std::floor(p.row);
  t.fc = p.col - cf;
  t.fr = p.row - rf;
  int c0 = static_cast<int>(cf);
  int r0 = static_cast<int>(rf);
  if (wrap == WrapAxis::kRows) {
    t.r0 = wrap_index(r0, height);
    t.r1 = wrap_index(r0 + 1, height);
    t.c0 = std::clamp(c0, 0, width - 1);
    t.c1 = std::clamp(c0 + 1, 0, width - 1);
  } else if (wrap == WrapAxis::kCols) {
    t.c0 = wrap_index(c0, width);
    t.c1 = wrap_index(c0 + 1, width);
    t.r0 = std::clamp(r0, 0, height - 1);
    t.r1 = std::clamp(r0 + 1, 0, height - 1);
  } else {
    t.r0 = std::clamp(r0, 0, height - 1);
    t.r1 = std::clamp(r0 + 1, 0, height - 1);
    t.c0 = std::clamp(c0, 0, width - 1);
    t.c1 = std::clamp(c0 + 1, 0, width - 1);
  }
  return t;
}

}  // namespace

float bilinear_plane(const float* data, int width, int height, int stride,
                     int offset, const PixelCoord& p, WrapAxis wrap) {
  const TapSet t = make_taps(width, height, p, wrap);
  auto v = [&](int r, int c) {
    return data[(static_cast<size_t>(r) * width + c) * stride + offset];
  };
  const double top = v(t.r0, t.c0) * (1.0 - t.fc) + v(t.r0, t.c1) * t.fc;
  const double bot = v(t.r1, t.c0) * (1.0 - t.fc) + v(t.r1, t.c1) * t.fc;
  return static_cast<float>(top * (1.0 - t.fr) + bot * t.fr);
}

bool bilinear_plane_masked(const float* data, const ValidityMask& mask,
                           int width, int height, int stride, int offset,
                           const PixelCoord& p, WrapAxis wrap, float* out) {
  const TapSet t = make_taps(width, height, p, wrap);
  const double w00 = (1.0 - t.fr) * (1.0 - t.fc);
  const double w01 = (1.0 - t.fr) * t.fc;
  const double w10 = t.fr * (1.0 - t.fc);
  const double w11 = t.fr * t.fc;
  // Only taps with nonzero weight contribute; any invalid contributor
  // invalidates the sample.
  if ((w00 > 0.0 && !mask.at(t.r0, t.c0)) ||
      (w01 > 0.0 && !mask.at(t.r0, t.c1)) ||
      (w10 > 0.0 && !mask.at(t.r1, t.c0)) ||
      (w11 > 0.0 && !mask.at(t.r1, t.c1)))
    return false;
  auto v = [&](int r, int c) {
    return data[(static_cast<size_t>(r) * width + c) * stride + offset];
  };
  *out = static_cast<float>(w00 * v(t.r0, t.c0) + w01 * v(t.r0, t.c1) +
                            w10 * v(t.r1, t.c0) + w11 * v(t.r1, t.c1));
  return true;
}

float bilinear_sample(const FloatMap& map, const PixelCoord& p,
                      WrapAxis wrap) {
  return bilinear_plane(map.data.data(), map.width, map.height, 1, 0, p, wrap);
}

float bilinear_sample(const PanoImage& img, const PixelCoord& p, int channel) {
  return bilinear_plane(img.data.data(), img.width, img.height, img.channels,
                        channel, p, wrap_axis_of(img.projection));
}

ValidityMask blind_point_mask(const GeerGrid& g, int margin_cols) {
  if (margin_cols < 0 || margin_cols >= g.width / 2)
    throw std::invalid_argument("blind_point_mask: margin outside [0, W/2)");
  ValidityMask mask(g.width, g.height, true);
  for (int r = 0; r < g.height; ++r)
    for (int m = 0; m < margin_cols; ++m) {
      mask.at(r, m) = 0;
      mask.at(r, g.width - 1 - m) = 0;
    }
  return mask;
}

}  // namespace mode
