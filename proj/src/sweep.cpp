#include "mode/sweep.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"
#include "mode/sgm.hpp"

namespace mode {

HypothesisSet make_hypotheses(double rho_min, double rho_max, int n) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min) || n < 2)
    throw ConfigError("make_hypotheses: need 0 < rho_min < rho_max, n >= 2");
  HypothesisSet hyp;
  hyp.depths.resize(static_cast<size_t>(n));
  const double inv_lo = 1.0 / rho_max;
  const double inv_hi = 1.0 / rho_min;
  for (int i = 0; i < n; ++i) {
    // ascending depth = descending inverse depth
    const double inv = inv_hi + (inv_lo - inv_hi) * i / (n - 1);
    hyp.depths[static_cast<size_t>(i)] = 1.0 / inv;
  }
  hyp.depths.front() = rho_min;
  hyp.depths.back() = rho_max;
  return hyp;
}

std::optional<PixelCoord> project_hypothesis(const CameraRig& rig,
                                             const std::string& cam_id,
                                             double theta, double phi,
                                             double rho, int erp_width,
                                             int erp_height) {
  if (!(rho > 0.0)) throw ConfigError("project_hypothesis: rho must be > 0");
  const auto& ref = rig.reference();
  const Vec3 dir_rig =
      ref.pose.rotation.apply_transposed(sph_to_cart({1.0, phi, theta}));
  const Vec3 p_rig = ref.pose.center + dir_rig * rho;
  const auto& cam = rig.camera(cam_id);
  const Vec3 p_cam = cam.pose.rotation * (p_rig - cam.pose.center);
  const SphericalCoord s = cart_to_sph(p_cam);
  if (s.rho < 1e-12) return std::nullopt;
  return erp_pixel_of(s, erp_width, erp_height);
}

SweepVolume build_sweep_cost(const CameraRig& rig,
                             const std::vector<SweepView>& views,
                             const HypothesisSet& hyp,
                             const SweepParams& params) {
  if (views.size() < 2)
    throw ConfigError("build_sweep_cost: at least 2 views required");
  const int gw = params.grid_width, gh = params.grid_height;
  const int n = static_cast<int>(hyp.depths.size());
  const int m = static_cast<int>(views.size());

  struct ViewData {
    Vec3 center;
    Mat3 rotation;
    DescriptorMap desc;
    PanoImage gray;
    const ValidityMask* mask;
    int w, h;
  };
  std::vector<ViewData> vd(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto& view = views[static_cast<size_t>(j)];
    if (!view.image) throw ConfigError("build_sweep_cost: view without image");
    const auto& cam = rig.camera(view.cam_id);
    auto& d = vd[static_cast<size_t>(j)];
    d.center = cam.pose.center;
    d.rotation = cam.pose.rotation;
    d.gray = to_gray(*view.image);
    if (params.cost == SweepCost::kCensus)
      d.desc = census_transform(d.gray, params.census_window);
    d.mask = view.mask;
    d.w = view.image->width;
    d.h = view.image->height;
  }

  const auto& ref = rig.reference();
  SweepVolume vol;
  vol.height = gh;
  vol.width = gw;
  vol.num_hypotheses = n;
  vol.cost.assign(static_cast<size_t>(gh) * gw * n, kCostSentinel);
  vol.view_count.assign(static_cast<size_t>(gh) * gw * n, 0);

  const float desc_norm =
      params.cost == SweepCost::kCensus
          ? 1.0f / static_cast<float>(params.census_window *
                                          params.census_window -
                                      1)
          : 1.0f;
  const int patch = 2;  // 5x5 intensity patch for ZNCC

  parallel_for(0, gh, [&](int r) {
    std::vector<uint64_t> descs(static_cast<size_t>(m));
    std::vector<std::array<float, 25>> patches(static_cast<size_t>(m));
    for (int c = 0; c < gw; ++c) {
      const SphericalCoord dir = erp_dir_of({double(c), double(r)}, gw, gh);
      const Vec3 dir_rig =
          ref.pose.rotation.apply_transposed(sph_to_cart(dir));
      for (int i = 0; i < n; ++i) {
        const double rho = hyp.depths[static_cast<size_t>(i)];
        const Vec3 p_rig = ref.pose.center + dir_rig * rho;
        int used = 0;
        for (int j = 0; j < m; ++j) {
          const auto& d = vd[static_cast<size_t>(j)];
          const Vec3 p_cam = d.rotation * (p_rig - d.center);
          const SphericalCoord s = cart_to_sph(p_cam);
          if (s.rho < 1e-12) continue;  // singular projection
          const PixelCoord px = erp_pixel_of(s, d.w, d.h);
          const int rr = std::clamp(static_cast<int>(std::lround(px.row)), 0,
                                    d.h - 1);
          int cc = static_cast<int>(std::lround(px.col)) % d.w;
          if (cc < 0) cc += d.w;
          if (d.mask && !d.mask->at(rr, cc)) continue;
          if (params.cost == SweepCost::kCensus) {
            descs[static_cast<size_t>(used)] = d.desc.at(rr, cc);
          } else {
            auto& pat = patches[static_cast<size_t>(used)];
            int t = 0;
            for (int dr = -patch; dr <= patch; ++dr)
              for (int dc = -patch; dc <= patch; ++dc) {
                const int pr = std::clamp(rr + dr, 0, d.h - 1);
                int pc = (cc + dc) % d.w;
                if (pc < 0) pc += d.w;
                pat[static_cast<size_t>(t++)] = d.gray.at(pr, pc);
              }
          }
          ++used;
        }
        const size_t idx =
            (static_cast<size_t>(r) * gw + c) * static_cast<size_t>(n) +
            static_cast<size_t>(i);
        vol.view_count[idx] = static_cast<uint8_t>(used);
        if (used < 2) continue;
        double sum = 0.0;
        int pairs = 0;
        if (params.cost == SweepCost::kCensus) {
          for (int a = 0; a < used; ++a)
            for (int b = a + 1; b < used; ++b) {
              sum += std::popcount(descs[static_cast<size_t>(a)] ^
                                   descs[static_cast<size_t>(b)]) *
                     desc_norm;
              ++pairs;
            }
        } else {
          auto stats = [&](const std::array<float, 25>& p, double& mean,
                           double& sd) {
            mean = 0.0;
            for (float v : p) mean += v;
            mean /= 25.0;
            sd = 0.0;
            for (float v : p) sd += (v - mean) * (v - mean);
            sd = std::sqrt(sd / 25.0);
          };
          for (int a = 0; a < used; ++a)
            for (int b = a + 1; b < used; ++b) {
              double ma, sa, mb, sb;
              stats(patches[static_cast<size_t>(a)], ma, sa);
              stats(patches[static_cast<size_t>(b)], mb, sb);
              double ncc = 0.0;
              if (sa > 1e-6 && sb > 1e-6) {
                for (int t = 0; t < 25; ++t)
                  ncc += (patches[static_cast<size_t>(a)][t] - ma) *
                         (patches[static_cast<size_t>(b)][t] - mb);
                ncc /= 25.0 * sa * sb;
              }
              sum += (1.0 - ncc) * 0.5;
              ++pairs;
            }
        }
        vol.cost[idx] = static_cast<float>(sum / pairs);
      }
    }
  });
  return vol;
}

SweepVolume aggregate_sweep(const SweepVolume& vol, float p1, float p2) {
  SweepVolume out = vol;
  detail::sgm_aggregate_raw(vol.cost.data(), out.cost.data(), vol.height,
                            vol.width, vol.num_hypotheses, p1, p2,
                            WrapAxis::kCols, kCostSentinel);
  return out;
}

SweepDepth softargmin_depth(const SweepVolume& vol, const HypothesisSet& hyp,
                            float temperature) {
  if (!(temperature > 0.0f))
    throw ConfigError("softargmin_depth: temperature must be > 0");
  if (static_cast<int>(hyp.depths.size()) != vol.num_hypotheses)
    throw ConfigError("softargmin_depth: hypothesis count mismatch");
  const int n = vol.num_hypotheses;
  SweepDepth out;
  out.depth = FloatMap(vol.width, vol.height, "m", kInvalidValue);
  out.confidence = ConfidenceMap(vol.width, vol.height, "", 0.0f);
  out.valid = ValidityMask(vol.width, vol.height, false);
  parallel_for(0, vol.height, [&](int r) {
    std::vector<double> w(static_cast<size_t>(n));
    for (int c = 0; c < vol.width; ++c) {
      const float* cost = &vol.at(r, c, 0);
      float mn = kCostSentinel;
      int best = -1;
      for (int i = 0; i < n; ++i)
        if (cost[i] < mn) {
          mn = cost[i];
          best = i;
        }
      if (best < 0) continue;
      double z = 0.0;
      for (int i = 0; i < n; ++i) {
        if (cost[i] == kCostSentinel) {
          w[static_cast<size_t>(i)] = 0.0;
          continue;
        }
        w[static_cast<size_t>(i)] = std::exp(-(cost[i] - mn) / temperature);
        z += w[static_cast<size_t>(i)];
      }
      double depth = 0.0;
      for (int i = 0; i < n; ++i)
        depth += w[static_cast<size_t>(i)] / z *
                 hyp.depths[static_cast<size_t>(i)];
      double mass = 0.0;
      for (int i = std::max(0, best - 1); i <= std::min(n - 1, best + 1); ++i)
        mass += w[static_cast<size_t>(i)] / z;
      out.depth.at(r, c) = static_cast<float>(depth);
      out.confidence.at(r, c) = static_cast<float>(mass);
      out.valid.at(r, c) = 1;
    }
  });
  return out;
}

}  // namespace mode
