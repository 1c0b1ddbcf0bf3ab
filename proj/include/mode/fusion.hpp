#pragma once

#include <vector>

#include "mode/rig.hpp"

namespace mode {

struct DepthLayer {
  FloatMap depth;       // meters, in the source frame
  FloatMap confidence;  // [0, 1]
  ValidityMask valid;
};

// Lifts every valid source pixel to a rig point, transforms it into the
// reference frame and splats it onto the nearest pixel of the reference ERP
// grid with a z-buffer (nearer depth wins, earlier source pixel on ties).
// Unhit reference pixels stay invalid.
DepthLayer reproject_depth(const DepthLayer& src, const Pose& source_frame,
                           Projection source_projection,
                           const Pose& reference_frame, int ref_width,
                           int ref_height);

struct FusionResult {
  FloatMap depth;
  FloatMap confidence;  // confidence of the selected candidate
  ValidityMask valid;
};

// Confidence-weighted median over inverse depth, per pixel. Candidates below
// conf_floor are dropped first; if that leaves none, all valid candidates
// are used. The median selects one candidate's depth, it never averages
// across a gap. Optional 4-neighbor diffusion fills remaining holes.
FusionResult fuse_aligned(const std::vector<DepthLayer>& layers,
                          float conf_floor, bool fill_holes = false);

}  // namespace mode
