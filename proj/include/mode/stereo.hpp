#pragma once

#include "mode/image.hpp"

namespace mode {

// Large finite marker for matching costs that must lose every comparison
// (out of image, masked). Real costs stay in [0, 1].
inline constexpr float kCostSentinel = 1e30f;

// Census bit strings, row-major neighborhood order, up to 48 bits (7x7).
struct DescriptorMap {
  int width = 0;
  int height = 0;
  int bits = 0;
  Projection projection = Projection::kGeer;
  std::vector<uint64_t> data;

  uint64_t at(int r, int c) const {
    return data[static_cast<size_t>(r) * width + c];
  }
};

// Matching costs indexed (row, col, disparity); one disparity step is one
// column, i.e. pi / width radians.
struct CostVolume {
  int height = 0;
  int width = 0;
  int num_disparities = 0;
  std::vector<float> cost;

  CostVolume() = default;
  CostVolume(int h, int w, int n, float fill = 0.0f)
      : height(h), width(w), num_disparities(n),
        cost(static_cast<size_t>(h) * w * n, fill) {}
  float& at(int r, int c, int k) {
    return cost[(static_cast<size_t>(r) * width + c) * num_disparities + k];
  }
  const float& at(int r, int c, int k) const {
    return cost[(static_cast<size_t>(r) * width + c) * num_disparities + k];
  }
};

struct DisparityMap {
  FloatMap disparity;  // pixels
  ValidityMask valid;
};

using ConfidenceMap = FloatMap;  // values in [0, 1]

PanoImage to_gray(const PanoImage& img);

// Census transform with a window of 3, 5 or 7: bit = 1 iff neighbor < center.
// Neighbors wrap on the azimuth axis and clamp on the elevation axis.
DescriptorMap census_transform(const PanoImage& gray, int window);

// cost(r, c, k) = normalized Hamming distance between a(r, c) and
// b(r + row_offset, c - shift_sign*k). Out-of-image or masked lookups get the
// sentinel. shift_sign +1 matches left-vs-right, -1 right-vs-left.
CostVolume build_cost_volume(const DescriptorMap& a, const DescriptorMap& b,
                             int num_disparities,
                             const ValidityMask* mask_a = nullptr,
                             const ValidityMask* mask_b = nullptr,
                             int row_offset = 0, int shift_sign = 1);

// 8-direction semi-global aggregation, averaged over directions so the
// output stays in cost units. Paths along the wrapped axis cross the azimuth
// seam.
CostVolume sgm_aggregate(const CostVolume& vol, float p1, float p2,
                         WrapAxis wrap = WrapAxis::kRows);

// Winner-take-all with parabola sub-pixel refinement; ties pick the smallest
// disparity, all-sentinel pixels come out invalid.
DisparityMap wta_subpixel(const CostVolume& vol);

// Probability mass of the three disparity hypotheses nearest the estimate,
// under a softmax of -cost/temperature (hypotheses outside the volume or
// masked contribute nothing).
ConfidenceMap confidence_map(const CostVolume& vol, const DisparityMap& disp,
                             float temperature);

// Pixel survives iff |disp_l(r,c) - disp_r(r, c - disp_l(r,c))| <= tol_px.
ValidityMask lr_consistency(const DisparityMap& left, const DisparityMap& right,
                            float tol_px);

}  // namespace mode
