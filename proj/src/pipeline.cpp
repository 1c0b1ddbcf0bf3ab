#include "mode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "mode/errors.hpp"
#include "mode/io.hpp"
#include "mode/parallel.hpp"
#include "mode/render.hpp"
#include "mode/sweep.hpp"

namespace fs = std::filesystem;

namespace mode {

namespace {

// Points matched at (near-)zero disparity sit beyond the resolvable range;
// they become far-but-finite so fusion can still overrule them.
constexpr float kFarDepthCap = 1e6f;
constexpr float kMinDisparityPx = 0.05f;

fs::path frame_dir(const RunConfig& cfg) { return cfg.out_dir / "frame"; }
fs::path rgb_path(const RunConfig& cfg, const std::string& cam) {
  return frame_dir(cfg) / "rgb" / (cam + ".png");
}
fs::path soiled_rgb_path(const RunConfig& cfg, const std::string& cam) {
  return frame_dir(cfg) / "soiled" / "rgb" / (cam + ".png");
}
fs::path soil_mask_path(const RunConfig& cfg, const std::string& cam) {
  return frame_dir(cfg) / "soiled" / "masks" / (cam + ".png");
}
fs::path pair_dir(const RunConfig& cfg, const std::string& l,
                  const std::string& r) {
  return frame_dir(cfg) / "pairs" / (l + "-" + r);
}
fs::path soiled_pair_dir(const RunConfig& cfg, const std::string& l,
                         const std::string& r) {
  return frame_dir(cfg) / "soiled" / "pairs" / (l + "-" + r);
}

ValidityMask invert(const ValidityMask& m) {
  ValidityMask out = m;
  for (auto& v : out.data) v = v ? 0 : 1;
  return out;
}

PanoImage read_pano(const fs::path& path, Projection proj) {
  PanoImage img = png_read(path);
  img.projection = proj;
  return img;
}

}  // namespace

std::string run_tag(const RunConfig& cfg, int n_views) {
  return cfg.mode + "_" + std::to_string(n_views) + "v" +
         (cfg.soiled ? "_soiled" : "");
}

std::vector<std::string> effective_views(const RunConfig& cfg,
                                         const CameraRig& rig) {
  const int n = cfg.views == 0
                    ? static_cast<int>(rig.cameras.size())
                    : cfg.views;
  if (n < 2 || n > static_cast<int>(rig.cameras.size()))
    throw ConfigError("views must be between 2 and the rig size");
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(rig.cameras[size_t(i)].id);
  if (std::find(ids.begin(), ids.end(), rig.reference_id) == ids.end())
    throw ConfigError("view subset must contain the reference camera");
  return ids;
}

std::vector<std::pair<std::string, std::string>> effective_pairs(
    const RunConfig& cfg, const CameraRig& rig) {
  const auto views = effective_views(cfg, rig);
  auto in_views = [&](const std::string& id) {
    return std::find(views.begin(), views.end(), id) != views.end();
  };
  std::vector<std::pair<std::string, std::string>> pairs;
  if (cfg.pairs.empty()) {
    for (size_t i = 0; i < views.size(); ++i)
      for (size_t j = i + 1; j < views.size(); ++j)
        pairs.emplace_back(views[i], views[j]);
  } else {
    for (const auto& [l, r] : cfg.pairs) {
      if (rig.index_of(l) < 0 || rig.index_of(r) < 0)
        throw ConfigError("pair '" + l + "-" + r + "': unknown camera id");
      if (l == r) throw ConfigError("pair '" + l + "-" + r + "' is degenerate");
      if (in_views(l) && in_views(r)) pairs.emplace_back(l, r);
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// render

void cmd_render(const RunConfig& cfg) {
  const CameraRig rig = load_rig(cfg.rig_path);
  if (cfg.scene_path.empty())
    throw ConfigError("render: [paths] scene missing");
  const Scene scene = load_scene(cfg.scene_path);
  if (scene.primitives.empty()) throw ConfigError("render: empty scene");

  const fs::path frame = frame_dir(cfg);
  fs::create_directories(frame / "rgb");

  std::map<std::string, PanoImage> erp_rgb;
  for (const auto& cam : rig.cameras) {
    RenderResult res = render_camera_erp(scene, rig, cam.id,
                                         cfg.render.erp_width,
                                         cfg.render.erp_height);
    png_write(res.rgb, rgb_path(cfg, cam.id), cfg.render.png_bits);
    if (cam.id == rig.reference_id)
      pfm_write(res.depth, frame / "depth_gt.pfm");
    erp_rgb.emplace(cam.id, std::move(res.rgb));
  }
  if (cfg.sweep.grid_width != cfg.render.erp_width ||
      cfg.sweep.grid_height != cfg.render.erp_height) {
    const auto& ref = rig.reference();
    RenderResult res =
        render_panorama(scene, ref.pose.center, ref.pose.rotation,
                        cfg.sweep.grid_width, cfg.sweep.grid_height,
                        Projection::kErp);
    pfm_write(res.depth, frame / "depth_gt_sweep.pfm");
  }

  const GeerGrid grid{cfg.render.geer_width, cfg.render.geer_height};
  RunConfig all = cfg;
  all.views = 0;  // render every configured pair regardless of view subset
  for (const auto& [l, r] : effective_pairs(all, rig)) {
    const RectifiedPair pair = rectify_pair(rig, l, r, grid);
    const fs::path dir = pair_dir(cfg, l, r);
    fs::create_directories(dir);
    const PanoImage geer_l =
        resample_to_geer(erp_rgb.at(l), rig.camera(l).pose, pair);
    const PanoImage geer_r =
        resample_to_geer(erp_rgb.at(r), rig.camera(r).pose, pair);
    png_write(geer_l, dir / "left.png", cfg.render.png_bits);
    png_write(geer_r, dir / "right.png", cfg.render.png_bits);
    const RenderResult left_gt = render_pair_geer(scene, rig, pair, true);
    pfm_write(render_gt_disparity(left_gt.depth, pair,
                                  cfg.stereo.blind_margin),
              dir / "disp_gt.pfm");
    mask_write(occlusion_mask(scene, rig, pair, left_gt.depth),
               dir / "occlusion.png");
  }

  if (!cfg.soil.enabled) return;
  fs::create_directories(frame / "soiled" / "rgb");
  fs::create_directories(frame / "soiled" / "masks");
  std::map<std::string, std::pair<PanoImage, ValidityMask>> soiled;
  for (const auto& cam_id : cfg.soil.cameras) {
    const int idx = rig.index_of(cam_id);
    if (idx < 0) throw ConfigError("soil: unknown camera '" + cam_id + "'");
    SoilSpec spec = cfg.soil.spec;
    spec.seed += static_cast<uint64_t>(idx);
    auto result = apply_soiling(erp_rgb.at(cam_id), spec);
    png_write(result.first, soiled_rgb_path(cfg, cam_id), cfg.render.png_bits);
    mask_write(result.second, soil_mask_path(cfg, cam_id));
    soiled.emplace(cam_id, std::move(result));
  }
  for (const auto& [l, r] : effective_pairs(all, rig)) {
    if (!soiled.count(l) && !soiled.count(r)) continue;
    const RectifiedPair pair = rectify_pair(rig, l, r, grid);
    const fs::path dir = soiled_pair_dir(cfg, l, r);
    fs::create_directories(dir);
    for (const bool left : {true, false}) {
      const std::string& cam = left ? l : r;
      if (!soiled.count(cam)) continue;
      const auto& [img, affected] = soiled.at(cam);
      auto [geer, usable] =
          resample_to_geer(img, invert(affected), rig.camera(cam).pose, pair);
      png_write(geer, dir / (left ? "left.png" : "right.png"),
                cfg.render.png_bits);
      mask_write(invert(usable),  // stored as affected-pixel masks
                 dir / (left ? "left_mask.png" : "right_mask.png"));
    }
  }
}

// ---------------------------------------------------------------------------
// estimate

PairStereoResult run_pair_stereo(const StereoConfig& cfg,
                                 const PanoImage& left, const PanoImage& right,
                                 const ValidityMask* left_mask,
                                 const ValidityMask* right_mask,
                                 const RectifiedPair& pair) {
  const DescriptorMap desc_l =
      census_transform(to_gray(left), cfg.census_window);
  const DescriptorMap desc_r =
      census_transform(to_gray(right), cfg.census_window);

  const CostVolume cost_l = build_cost_volume(
      desc_l, desc_r, cfg.num_disparities, left_mask, right_mask);
  const CostVolume agg_l = sgm_aggregate(cost_l, cfg.p1, cfg.p2);
  DisparityMap disp_l = wta_subpixel(agg_l);
  const ConfidenceMap conf = confidence_map(agg_l, disp_l, cfg.temperature);

  const CostVolume cost_r =
      build_cost_volume(desc_r, desc_l, cfg.num_disparities, right_mask,
                        left_mask, /*row_offset=*/0, /*shift_sign=*/-1);
  const DisparityMap disp_r = wta_subpixel(sgm_aggregate(cost_r, cfg.p1, cfg.p2));

  ValidityMask valid =
      lr_consistency(disp_l, disp_r, cfg.lr_tolerance);
  valid = mask_and(valid, blind_point_mask(pair.grid, cfg.blind_margin));

  FloatMap depth(pair.grid.width, pair.grid.height, "m", kInvalidValue);
  const double rad_per_px = kPi / pair.grid.width;
  for (int r = 0; r < pair.grid.height; ++r)
    for (int c = 0; c < pair.grid.width; ++c) {
      if (!valid.at(r, c)) continue;
      const float dpx = disp_l.disparity.at(r, c);
      if (dpx < kMinDisparityPx) {
        depth.at(r, c) = kFarDepthCap;
        continue;
      }
      const double phi_l = (c + 0.5) * kPi / pair.grid.width;
      const double d = dpx * rad_per_px;
      if (d >= phi_l) {  // matched past the pole: no consistent geometry
        valid.at(r, c) = 0;
        continue;
      }
      depth.at(r, c) = std::min(
          static_cast<float>(disparity_to_depth(phi_l, d, pair.baseline)),
          kFarDepthCap);
    }

  return {std::move(disp_l), conf, std::move(depth), std::move(valid)};
}

namespace {

struct LoadedView {
  PanoImage image;
  ValidityMask usable;  // 1 = feed to matching
  bool has_mask = false;
};

LoadedView load_view_erp(const RunConfig& cfg, const std::string& cam) {
  LoadedView view;
  const fs::path clean = rgb_path(cfg, cam);
  const fs::path dirty = soiled_rgb_path(cfg, cam);
  const bool use_soiled = cfg.soiled && fs::exists(dirty);
  if (!fs::exists(use_soiled ? dirty : clean))
    throw DataError("estimate: missing " + (use_soiled ? dirty : clean).string() +
                    " (run render first)");
  view.image = read_pano(use_soiled ? dirty : clean, Projection::kErp);
  if (use_soiled && fs::exists(soil_mask_path(cfg, cam))) {
    view.usable = invert(mask_read(soil_mask_path(cfg, cam)));
    view.has_mask = true;
  } else {
    view.usable = ValidityMask(view.image.width, view.image.height, true);
  }
  return view;
}

LoadedView load_view_geer(const RunConfig& cfg, const std::string& l,
                          const std::string& r, bool left) {
  LoadedView view;
  const std::string name = left ? "left" : "right";
  const fs::path clean = pair_dir(cfg, l, r) / (name + ".png");
  const fs::path dirty = soiled_pair_dir(cfg, l, r) / (name + ".png");
  const bool use_soiled = cfg.soiled && fs::exists(dirty);
  if (!fs::exists(use_soiled ? dirty : clean))
    throw DataError("estimate: missing " + (use_soiled ? dirty : clean).string() +
                    " (run render first)");
  view.image = read_pano(use_soiled ? dirty : clean, Projection::kGeer);
  const fs::path mask = soiled_pair_dir(cfg, l, r) / (name + "_mask.png");
  if (use_soiled && fs::exists(mask)) {
    view.usable = invert(mask_read(mask));
    view.has_mask = true;
  } else {
    view.usable = ValidityMask(view.image.width, view.image.height, true);
  }
  return view;
}

}  // namespace

void cmd_estimate(const RunConfig& cfg) {
  const CameraRig rig = load_rig(cfg.rig_path);
  const auto views = effective_views(cfg, rig);
  const std::string tag = run_tag(cfg, static_cast<int>(views.size()));
  const auto& ref = rig.reference();

  FloatMap depth, conf;
  if (cfg.mode == "pairwise") {
    const auto pairs = effective_pairs(cfg, rig);
    if (pairs.empty()) throw ConfigError("estimate: no usable pairs");
    const GeerGrid grid{cfg.render.geer_width, cfg.render.geer_height};
    std::vector<DepthLayer> layers;
    for (const auto& [l, r] : pairs) {
      const RectifiedPair pair = rectify_pair(rig, l, r, grid);
      const LoadedView lv = load_view_geer(cfg, l, r, true);
      const LoadedView rv = load_view_geer(cfg, l, r, false);
      PairStereoResult res = run_pair_stereo(
          cfg.stereo, lv.image, rv.image, lv.has_mask ? &lv.usable : nullptr,
          rv.has_mask ? &rv.usable : nullptr, pair);
      const Pose source_frame{rig.camera(l).pose.center, pair.rect_rotation};
      layers.push_back(reproject_depth(
          {std::move(res.depth), std::move(res.conf), std::move(res.valid)},
          source_frame, Projection::kGeer, ref.pose, cfg.render.erp_width,
          cfg.render.erp_height));
    }
    FusionResult fused =
        fuse_aligned(layers, cfg.fusion.conf_floor, cfg.fusion.fill_holes);
    depth = std::move(fused.depth);
    conf = std::move(fused.confidence);
  } else {
    std::vector<LoadedView> loaded;
    loaded.reserve(views.size());
    for (const auto& cam : views) loaded.push_back(load_view_erp(cfg, cam));
    std::vector<SweepView> sviews;
    for (size_t i = 0; i < views.size(); ++i)
      sviews.push_back({views[i], &loaded[i].image,
                        loaded[i].has_mask ? &loaded[i].usable : nullptr});
    const HypothesisSet hyp = make_hypotheses(
        cfg.sweep.rho_min, cfg.sweep.rho_max, cfg.sweep.num_hypotheses);
    SweepParams params;
    params.grid_width = cfg.sweep.grid_width;
    params.grid_height = cfg.sweep.grid_height;
    params.census_window = cfg.sweep.census_window;
    params.cost = cfg.sweep.cost;
    const SweepVolume vol = build_sweep_cost(rig, sviews, hyp, params);
    const SweepVolume agg = aggregate_sweep(vol, cfg.sweep.p1, cfg.sweep.p2);
    SweepDepth sd = softargmin_depth(agg, hyp, cfg.sweep.temperature);
    depth = std::move(sd.depth);
    conf = std::move(sd.confidence);
  }

  fs::create_directories(cfg.out_dir);
  pfm_write(depth, cfg.out_dir / ("depth_" + tag + ".pfm"));
  pfm_write(conf, cfg.out_dir / ("confidence_" + tag + ".pfm"));
}

// ---------------------------------------------------------------------------
// eval

MetricReport cmd_eval(const RunConfig& cfg, const fs::path& pred_path,
                      const fs::path& gt_path, const std::string& kind) {
  if (kind != "depth" && kind != "disparity")
    throw ConfigError("eval: kind must be depth or disparity");
  const FloatMap pred = pfm_read(pred_path);
  const FloatMap gt = pfm_read(gt_path);
  if (pred.width != gt.width || pred.height != gt.height)
    throw DataError("eval: grid mismatch between prediction and ground truth");

  ValidityMask mask(pred.width, pred.height, false);
  for (size_t i = 0; i < mask.data.size(); ++i)
    mask.data[i] =
        std::isfinite(pred.data[i]) && std::isfinite(gt.data[i]) ? 1 : 0;

  const MetricReport report =
      kind == "disparity"
          ? disparity_metrics(pred, gt, mask)
          : depth_metrics(pred, gt, mask, cfg.metrics.silog_lambda);

  const fs::path dir = cfg.out_dir / ("eval_" + pred_path.stem().string());
  fs::create_directories(dir);
  std::ofstream(dir / "report.json") << report_json(report);
  std::ofstream(dir / "report.txt") << report_table(report);

  // |error| heat map, normalized by the 95th percentile
  std::vector<float> errs;
  FloatMap err(pred.width, pred.height, "", 0.0f);
  for (size_t i = 0; i < mask.data.size(); ++i)
    if (mask.data[i]) {
      err.data[i] = std::abs(pred.data[i] - gt.data[i]);
      errs.push_back(err.data[i]);
    }
  std::sort(errs.begin(), errs.end());
  const float p95 =
      errs.empty() ? 1.0f
                   : std::max(errs[errs.size() * 95 / 100], 1e-12f);
  PanoImage heat(pred.width, pred.height, 1, Projection::kErp);
  for (size_t i = 0; i < mask.data.size(); ++i)
    heat.data[i] = mask.data[i] ? std::min(1.0f, err.data[i] / p95) : 0.0f;
  png_write(heat, dir / "error_map.png", 8);

  if (kind == "depth") {
    const CameraRig rig = load_rig(cfg.rig_path);
    const auto& ref = rig.reference();
    PanoImage rgb;
    const fs::path rgb_file = rgb_path(cfg, ref.id);
    if (fs::exists(rgb_file)) rgb = read_pano(rgb_file, Projection::kErp);
    std::ofstream cloud(dir / "cloud.xyz");
    for (int r = 0; r < pred.height; ++r)
      for (int c = 0; c < pred.width; ++c) {
        if (!mask.at(r, c)) continue;
        const Ray ray = world_ray_of(rig, ref.id, {double(c), double(r)},
                                     pred.width, pred.height);
        const Vec3 p = ray.origin + ray.direction * pred.at(r, c);
        int rgb8[3] = {128, 128, 128};
        if (rgb.width > 0) {
          const PixelCoord q{(c + 0.5) * rgb.width / pred.width - 0.5,
                             (r + 0.5) * rgb.height / pred.height - 0.5};
          for (int ch = 0; ch < 3; ++ch)
            rgb8[ch] = static_cast<int>(
                std::lround(255.0f * bilinear_sample(rgb, q, ch)));
        }
        char line[160];
        std::snprintf(line, sizeof(line), "%.6f %.6f %.6f %d %d %d\n", p.x,
                      p.y, p.z, rgb8[0], rgb8[1], rgb8[2]);
        cloud << line;
      }
  }
  return report;
}

MetricReport cmd_pipeline(const RunConfig& cfg) {
  cmd_render(cfg);
  cmd_estimate(cfg);
  const CameraRig rig = load_rig(cfg.rig_path);
  const int n_views = static_cast<int>(effective_views(cfg, rig).size());
  const std::string tag = run_tag(cfg, n_views);
  const bool sweep_grid =
      cfg.mode == "sweep" && (cfg.sweep.grid_width != cfg.render.erp_width ||
                              cfg.sweep.grid_height != cfg.render.erp_height);
  const fs::path gt = frame_dir(cfg) /
                      (sweep_grid ? "depth_gt_sweep.pfm" : "depth_gt.pfm");
  const MetricReport report =
      cmd_eval(cfg, cfg.out_dir / ("depth_" + tag + ".pfm"), gt, "depth");
  std::cout << "[" << tag << "]\n" << report_table(report);
  return report;
}

}  // namespace mode
