#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mode/geometry.hpp"

namespace mode {

enum class Projection { kErp, kGeer };

// The azimuth axis wraps: rows for GEER, columns for ERP. The other axis
// clamps at its border.
enum class WrapAxis { kNone, kRows, kCols };

inline WrapAxis wrap_axis_of(Projection p) {
  return p == Projection::kGeer ? WrapAxis::kRows : WrapAxis::kCols;
}

// Raster of float values in [0, 1], 1 or 3 channels, row-major.
struct PanoImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  Projection projection = Projection::kErp;
  std::vector<float> data;

  PanoImage() = default;
  PanoImage(int w, int h, int ch, Projection proj, float fill = 0.0f)
      : width(w), height(h), channels(ch), projection(proj),
        data(static_cast<size_t>(w) * h * ch, fill) {}

  float& at(int r, int c, int ch = 0) {
    return data[(static_cast<size_t>(r) * width + c) * channels + ch];
  }
  float at(int r, int c, int ch = 0) const {
    return data[(static_cast<size_t>(r) * width + c) * channels + ch];
  }
};

// Single-channel float raster for depth/disparity/cost/confidence values.
// Invalid entries hold +inf so arithmetic stays NaN-free.
struct FloatMap {
  int width = 0;
  int height = 0;
  std::string unit;  // "m", "px", "rad", or empty for unitless
  std::vector<float> data;

  FloatMap() = default;
  FloatMap(int w, int h, std::string u = {}, float fill = 0.0f)
      : width(w), height(h), unit(std::move(u)),
        data(static_cast<size_t>(w) * h, fill) {}

  float& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
  float at(int r, int c) const {
    return data[static_cast<size_t>(r) * width + c];
  }
};

inline constexpr float kInvalidValue = std::numeric_limits<float>::infinity();

struct ValidityMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // 1 = valid

  ValidityMask() = default;
  ValidityMask(int w, int h, bool valid = true)
      : width(w), height(h),
        data(static_cast<size_t>(w) * h, valid ? 1 : 0) {}

  uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
  uint8_t at(int r, int c) const {
    return data[static_cast<size_t>(r) * width + c];
  }
  size_t count_valid() const;
};

ValidityMask mask_and(const ValidityMask& a, const ValidityMask& b);

// Bilinear interpolation of one raster plane. The wrap axis is periodic, the
// other axis clamps at its border. When mask is given, the result is invalid
// (returns false) as soon as any pixel with nonzero weight is invalid.
float bilinear_plane(const float* data, int width, int height, int stride,
                     int offset, const PixelCoord& p, WrapAxis wrap);
bool bilinear_plane_masked(const float* data, const ValidityMask& mask,
                           int width, int height, int stride, int offset,
                           const PixelCoord& p, WrapAxis wrap, float* out);

float bilinear_sample(const FloatMap& map, const PixelCoord& p, WrapAxis wrap);
float bilinear_sample(const PanoImage& img, const PixelCoord& p,
                      int channel = 0);

// Marks the margin_cols leftmost and rightmost GEER columns invalid: the
// pixels nearest the baseline axis where disparity vanishes (blind points).
ValidityMask blind_point_mask(const GeerGrid& g, int margin_cols);

}  // namespace mode
