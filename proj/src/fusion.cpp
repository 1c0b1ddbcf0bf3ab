#include "mode/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"

namespace mode {

DepthLayer reproject_depth(const DepthLayer& src, const Pose& source_frame,
                           Projection source_projection,
                           const Pose& reference_frame, int ref_width,
                           int ref_height) {
  const int sw = src.depth.width, sh = src.depth.height;
  DepthLayer out;
  out.depth = FloatMap(ref_width, ref_height, "m", kInvalidValue);
  out.confidence = FloatMap(ref_width, ref_height, "", 0.0f);
  out.valid = ValidityMask(ref_width, ref_height, false);

  // Sequential row-major order makes the z-buffer tie-break (first source
  // pixel wins on equal depth) reproducible.
  for (int r = 0; r < sh; ++r) {
    for (int c = 0; c < sw; ++c) {
      if (!src.valid.at(r, c)) continue;
      const float rho = src.depth.at(r, c);
      if (!(rho > 0.0f) || !std::isfinite(rho)) continue;
      const PixelCoord px{double(c), double(r)};
      const SphericalCoord dir =
          source_projection == Projection::kGeer
              ? geer_dir_of(px, GeerGrid{sw, sh})
              : erp_dir_of(px, sw, sh);
      const Vec3 p_rig =
          source_frame.center +
          source_frame.rotation.apply_transposed(sph_to_cart(dir)) * rho;
      const Vec3 q = reference_frame.rotation * (p_rig - reference_frame.center);
      const SphericalCoord s = cart_to_sph(q);
      if (s.rho < 1e-12) continue;
      const PixelCoord tp = erp_pixel_of(s, ref_width, ref_height);
      const int tr = std::clamp(static_cast<int>(std::lround(tp.row)), 0,
                                ref_height - 1);
      int tc = static_cast<int>(std::lround(tp.col)) % ref_width;
      if (tc < 0) tc += ref_width;
      const float depth_ref = static_cast<float>(s.rho);
      if (depth_ref < out.depth.at(tr, tc)) {
        out.depth.at(tr, tc) = depth_ref;
        out.confidence.at(tr, tc) = src.confidence.at(r, c);
        out.valid.at(tr, tc) = 1;
      }
    }
  }
  return out;
}

namespace {

struct Candidate {
  float depth;
  float conf;
};

// Weighted median: candidates ordered by descending inverse depth (ascending
// depth); the first whose cumulative weight reaches half the total wins.
Candidate weighted_median(std::vector<Candidate>& cands) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.depth < b.depth;
            });
  double total = 0.0;
  for (const auto& cand : cands) total += cand.conf;
  if (total <= 0.0) return cands[cands.size() / 2];
  double cum = 0.0;
  for (const auto& cand : cands) {
    cum += cand.conf;
    if (cum * 2.0 >= total) return cand;
  }
  return cands.back();
}

void diffusion_fill(FloatMap& depth, FloatMap& conf, ValidityMask& valid) {
  const int w = depth.width, h = depth.height;
  for (int iter = 0; iter < w + h; ++iter) {
    ValidityMask next_valid = valid;
    FloatMap next_depth = depth;
    FloatMap next_conf = conf;
    bool changed = false;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (valid.at(r, c)) continue;
        double sum = 0.0, csum = 0.0;
        int n = 0;
        const int rs[4] = {r - 1, r + 1, r, r};
        const int cs[4] = {c, c, (c + w - 1) % w, (c + 1) % w};
        for (int k = 0; k < 4; ++k) {
          if (rs[k] < 0 || rs[k] >= h) continue;
          if (!valid.at(rs[k], cs[k])) continue;
          sum += depth.at(rs[k], cs[k]);
          csum += conf.at(rs[k], cs[k]);
          ++n;
        }
        if (n > 0) {
          next_depth.at(r, c) = static_cast<float>(sum / n);
          next_conf.at(r, c) = static_cast<float>(csum / n);
          next_valid.at(r, c) = 1;
          changed = true;
        }
      }
    depth = std::move(next_depth);
    conf = std::move(next_conf);
    valid = std::move(next_valid);
    if (!changed) break;
  }
}

}  // namespace

FusionResult fuse_aligned(const std::vector<DepthLayer>& layers,
                          float conf_floor, bool fill_holes) {
  if (layers.empty()) throw ConfigError("fuse_aligned: no layers");
  const int w = layers[0].depth.width, h = layers[0].depth.height;
  for (const auto& layer : layers)
    if (layer.depth.width != w || layer.depth.height != h)
      throw ConfigError("fuse_aligned: layer grids differ");

  FusionResult out;
  out.depth = FloatMap(w, h, "m", kInvalidValue);
  out.confidence = FloatMap(w, h, "", 0.0f);
  out.valid = ValidityMask(w, h, false);

  parallel_for(0, h, [&](int r) {
    std::vector<Candidate> cands, kept;
    for (int c = 0; c < w; ++c) {
      cands.clear();
      kept.clear();
      for (const auto& layer : layers) {
        if (!layer.valid.at(r, c)) continue;
        const float depth = layer.depth.at(r, c);
        if (!(depth > 0.0f) || !std::isfinite(depth)) continue;
        cands.push_back({depth, layer.confidence.at(r, c)});
      }
      if (cands.empty()) continue;
      for (const auto& cand : cands)
        if (cand.conf >= conf_floor) kept.push_back(cand);
      if (kept.empty()) kept = cands;  // relax when the floor drops everyone
      const Candidate sel = weighted_median(kept);
      out.depth.at(r, c) = sel.depth;
      out.confidence.at(r, c) = sel.conf;
      out.valid.at(r, c) = 1;
    }
  });

  if (fill_holes) diffusion_fill(out.depth, out.confidence, out.valid);
  return out;
}

}  // namespace mode
