#pragma once

#include "mode/config.hpp"
#include "mode/fusion.hpp"
#include "mode/metrics.hpp"
#include "mode/stereo.hpp"

namespace mode {

// Output layout under out_dir:
//   frame/rgb/<cam>.png                      per-camera ERP panorama
//   frame/depth_gt.pfm                       reference depth at ERP size
//   frame/depth_gt_sweep.pfm                 reference depth at the sweep grid
//   frame/pairs/<l>-<r>/left.png right.png disp_gt.pfm occlusion.png
//   frame/soiled/rgb|masks/<cam>.png         soiled panoramas + affected masks
//   frame/soiled/pairs/<l>-<r>/{left,right}{,_mask}.png
//   depth_<tag>.pfm confidence_<tag>.pfm     estimation outputs
//   eval_<name>/report.json report.txt error_map.png cloud.xyz

std::string run_tag(const RunConfig& cfg, int n_views);

// Camera ids taking part in a run: the first `views` rig cameras (all when
// views == 0). The reference must be among them.
std::vector<std::string> effective_views(const RunConfig& cfg,
                                         const CameraRig& rig);
// Pair list from the config, or every camera combination, restricted to the
// effective views. The earlier rig camera is the left member.
std::vector<std::pair<std::string, std::string>> effective_pairs(
    const RunConfig& cfg, const CameraRig& rig);

struct PairStereoResult {
  DisparityMap disp;     // left-view disparity, pixels
  ConfidenceMap conf;
  FloatMap depth;        // meters at the left camera, GEER frame
  ValidityMask valid;    // non-blind, matched and LR-consistent
};

// Census -> cost volume -> SGM -> sub-pixel WTA, both directions, with an
// LR check; then disparity converted to left-camera depth.
PairStereoResult run_pair_stereo(const StereoConfig& cfg,
                                 const PanoImage& left, const PanoImage& right,
                                 const ValidityMask* left_mask,
                                 const ValidityMask* right_mask,
                                 const RectifiedPair& pair);

void cmd_render(const RunConfig& cfg);
void cmd_estimate(const RunConfig& cfg);
MetricReport cmd_eval(const RunConfig& cfg,
                      const std::filesystem::path& pred_path,
                      const std::filesystem::path& gt_path,
                      const std::string& kind);
MetricReport cmd_pipeline(const RunConfig& cfg);

}  // namespace mode
