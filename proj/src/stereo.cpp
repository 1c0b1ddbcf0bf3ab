#include "mode/stereo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"
#include "mode/sgm.hpp"

namespace mode {

PanoImage to_gray(const PanoImage& img) {
  if (img.channels == 1) return img;
  PanoImage gray(img.width, img.height, 1, img.projection);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      gray.at(r, c) = 0.299f * img.at(r, c, 0) + 0.587f * img.at(r, c, 1) +
                      0.114f * img.at(r, c, 2);
  return gray;
}

DescriptorMap census_transform(const PanoImage& gray, int window) {
  if (gray.channels != 1)
    throw ConfigError("census_transform: grayscale input required");
  if (window != 3 && window != 5 && window != 7)
    throw ConfigError("census_transform: window must be 3, 5 or 7");
  const int half = window / 2;
  const int w = gray.width, h = gray.height;
  const bool wrap_rows = wrap_axis_of(gray.projection) == WrapAxis::kRows;

  DescriptorMap desc;
  desc.width = w;
  desc.height = h;
  desc.bits = window * window - 1;
  desc.projection = gray.projection;
  desc.data.assign(static_cast<size_t>(w) * h, 0);

  parallel_for(0, h, [&](int r) {
    for (int c = 0; c < w; ++c) {
      const float center = gray.at(r, c);
      uint64_t bits = 0;
      for (int dr = -half; dr <= half; ++dr)
        for (int dc = -half; dc <= half; ++dc) {
          if (dr == 0 && dc == 0) continue;
          int rr = r + dr, cc = c + dc;
          if (wrap_rows) {
            rr = (rr % h + h) % h;
            cc = std::clamp(cc, 0, w - 1);
          } else {
            cc = (cc % w + w) % w;
            rr = std::clamp(rr, 0, h - 1);
          }
          bits = (bits << 1) | (gray.at(rr, cc) < center ? 1u : 0u);
        }
      desc.data[static_cast<size_t>(r) * w + c] = bits;
    }
  });
  return desc;
}

CostVolume build_cost_volume(const DescriptorMap& a, const DescriptorMap& b,
                             int num_disparities, const ValidityMask* mask_a,
                             const ValidityMask* mask_b, int row_offset,
                             int shift_sign) {
  if (a.width != b.width || a.height != b.height || a.bits != b.bits)
    throw ConfigError("build_cost_volume: descriptor grids differ");
  if (num_disparities < 1 || num_disparities > a.width / 2)
    throw ConfigError("build_cost_volume: need 1 <= N_d <= W/2");
  const int w = a.width, h = a.height, n = num_disparities;
  const float norm = 1.0f / static_cast<float>(a.bits);
  CostVolume vol(h, w, n);
  parallel_for(0, h, [&](int r) {
    const int rb = ((r + row_offset) % h + h) % h;
    for (int c = 0; c < w; ++c) {
      float* dst = &vol.at(r, c, 0);
      if (mask_a && !mask_a->at(r, c)) {
        for (int k = 0; k < n; ++k) dst[k] = kCostSentinel;
        continue;
      }
      const uint64_t da = a.at(r, c);
      for (int k = 0; k < n; ++k) {
        const int cb = c - shift_sign * k;
        if (cb < 0 || cb >= w || (mask_b && !mask_b->at(rb, cb))) {
          dst[k] = kCostSentinel;
          continue;
        }
        dst[k] = static_cast<float>(std::popcount(da ^ b.at(rb, cb))) * norm;
      }
    }
  });
  return vol;
}

CostVolume sgm_aggregate(const CostVolume& vol, float p1, float p2,
                         WrapAxis wrap) {
  CostVolume out(vol.height, vol.width, vol.num_disparities);
  detail::sgm_aggregate_raw(vol.cost.data(), out.cost.data(), vol.height,
                            vol.width, vol.num_disparities, p1, p2, wrap,
                            kCostSentinel);
  return out;
}

DisparityMap wta_subpixel(const CostVolume& vol) {
  if (vol.num_disparities < 3)
    throw ConfigError("wta_subpixel: need at least 3 disparities");
  DisparityMap out;
  out.disparity = FloatMap(vol.width, vol.height, "px", kInvalidValue);
  out.valid = ValidityMask(vol.width, vol.height, false);
  const int n = vol.num_disparities;
  parallel_for(0, vol.height, [&](int r) {
    for (int c = 0; c < vol.width; ++c) {
      const float* cost = &vol.at(r, c, 0);
      int best = -1;
      float best_cost = kCostSentinel;
      for (int k = 0; k < n; ++k)
        if (cost[k] < best_cost) {  // strict: ties keep the smallest k
          best_cost = cost[k];
          best = k;
        }
      if (best < 0) continue;
      double d = best;
      if (best > 0 && best + 1 < n && cost[best - 1] != kCostSentinel &&
          cost[best + 1] != kCostSentinel) {
        const double cm = cost[best - 1], c0 = cost[best], cp = cost[best + 1];
        const double denom = cm + cp - 2.0 * c0;
        if (denom > 0.0) {
          const double delta = (cm - cp) / (2.0 * denom);
          d = best + std::clamp(delta, -0.5, 0.5);
        }
      }
      out.disparity.at(r, c) = static_cast<float>(d);
      out.valid.at(r, c) = 1;
    }
  });
  return out;
}

ConfidenceMap confidence_map(const CostVolume& vol, const DisparityMap& disp,
                             float temperature) {
  if (!(temperature > 0.0f))
    throw ConfigError("confidence_map: temperature must be > 0");
  ConfidenceMap conf(vol.width, vol.height, "", 0.0f);
  const int n = vol.num_disparities;
  parallel_for(0, vol.height, [&](int r) {
    for (int c = 0; c < vol.width; ++c) {
      if (!disp.valid.at(r, c)) continue;
      const float* cost = &vol.at(r, c, 0);
      float mn = kCostSentinel;
      for (int k = 0; k < n; ++k) mn = std::min(mn, cost[k]);
      if (mn == kCostSentinel) continue;
      double z = 0.0;
      for (int k = 0; k < n; ++k)
        if (cost[k] != kCostSentinel)
          z += std::exp(-(cost[k] - mn) / temperature);
      const int ks = std::clamp(
          static_cast<int>(std::lround(disp.disparity.at(r, c))), 0, n - 1);
      double mass = 0.0;
      for (int k = std::max(0, ks - 1); k <= std::min(n - 1, ks + 1); ++k)
        if (cost[k] != kCostSentinel)
          mass += std::exp(-(cost[k] - mn) / temperature);
      conf.at(r, c) = static_cast<float>(mass / z);
    }
  });
  return conf;
}

ValidityMask lr_consistency(const DisparityMap& left, const DisparityMap& right,
                            float tol_px) {
  if (left.disparity.width != right.disparity.width ||
      left.disparity.height != right.disparity.height)
    throw ConfigError("lr_consistency: grids differ");
  const int w = left.disparity.width, h = left.disparity.height;
  ValidityMask ok(w, h, false);
  parallel_for(0, h, [&](int r) {
    for (int c = 0; c < w; ++c) {
      if (!left.valid.at(r, c)) continue;
      const float dl = left.disparity.at(r, c);
      const double cr = c - dl;
      if (cr < 0.0 || cr > w - 1.0) continue;
      float dr = 0.0f;
      if (!bilinear_plane_masked(right.disparity.data.data(), right.valid, w,
                                 h, 1, 0, {cr, double(r)}, WrapAxis::kRows,
                                 &dr))
        continue;
      if (std::abs(dl - dr) <= tol_px) ok.at(r, c) = 1;
    }
  });
  return ok;
}

}  // namespace mode
