#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mode/rig.hpp"
#include "mode/stereo.hpp"

namespace mode {

// Depths of the sweeping spheres, ascending, spaced uniformly in inverse
// depth so each step moves the projections by roughly constant parallax.
struct HypothesisSet {
  std::vector<double> depths;
};

HypothesisSet make_hypotheses(double rho_min, double rho_max, int n);

// Unified multi-view matching cost on the reference view's ERP grid:
// cost(r, c, i) over hypothesis index i, plus the number of views that
// contributed to each entry. Entries with fewer than 2 views are sentinel.
struct SweepVolume {
  int height = 0;
  int width = 0;
  int num_hypotheses = 0;
  std::vector<float> cost;
  std::vector<uint8_t> view_count;

  float& at(int r, int c, int i) {
    return cost[(static_cast<size_t>(r) * width + c) * num_hypotheses + i];
  }
  const float& at(int r, int c, int i) const {
    return cost[(static_cast<size_t>(r) * width + c) * num_hypotheses + i];
  }
  uint8_t count_at(int r, int c, int i) const {
    return view_count[(static_cast<size_t>(r) * width + c) * num_hypotheses +
                      i];
  }
};

// Image pixel of the point at depth rho along the reference ray (theta, phi),
// in cam_id's ERP panorama of the given size. nullopt when the point
// coincides with the camera center (singular projection).
std::optional<PixelCoord> project_hypothesis(const CameraRig& rig,
                                             const std::string& cam_id,
                                             double theta, double phi,
                                             double rho, int erp_width,
                                             int erp_height);

struct SweepView {
  std::string cam_id;
  const PanoImage* image = nullptr;     // ERP
  const ValidityMask* mask = nullptr;   // optional, 1 = usable pixel
};

enum class SweepCost { kCensus, kZncc };

struct SweepParams {
  int grid_width = 256;   // theta axis
  int grid_height = 128;  // phi axis
  int census_window = 5;
  SweepCost cost = SweepCost::kCensus;
};

// Mean pairwise dissimilarity of the per-view samples at each projected
// hypothesis point; views whose sample is masked are excluded. Census
// descriptors are looked up nearest-neighbor (bits cannot be blended).
SweepVolume build_sweep_cost(const CameraRig& rig,
                             const std::vector<SweepView>& views,
                             const HypothesisSet& hyp,
                             const SweepParams& params);

// Same recurrence and wrap rules as sgm_aggregate, over the hypothesis axis;
// azimuth runs along columns here.
SweepVolume aggregate_sweep(const SweepVolume& vol, float p1, float p2);

struct SweepDepth {
  FloatMap depth;         // meters
  ConfidenceMap confidence;
  ValidityMask valid;
};

// Soft-argmin regression: w_i = softmax(-cost/T), depth = sum w_i * rho_i.
// Confidence is the weight mass at the three hypotheses nearest the best one.
SweepDepth softargmin_depth(const SweepVolume& vol, const HypothesisSet& hyp,
                            float temperature);

}  // namespace mode
