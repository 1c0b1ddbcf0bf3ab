#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mode/image.hpp"

namespace mode {

// Camera extrinsics in the rig frame: x_cam = rotation * (x_rig - center).
struct Pose {
  Vec3 center;
  Mat3 rotation;
};

struct CameraRig {
  struct Camera {
    std::string id;
    Pose pose;
  };
  std::vector<Camera> cameras;
  std::string reference_id;

  int index_of(const std::string& id) const;  // -1 when absent
  const Camera& camera(const std::string& id) const;
  const Camera& reference() const { return camera(reference_id); }
  void validate() const;
};

// A stereo pair rectified into the GEER frame whose x-axis runs from the
// right camera center to the left one.
struct RectifiedPair {
  std::string left_id;
  std::string right_id;
  double baseline = 0.0;
  Mat3 rect_rotation;  // rig frame -> rectified frame
  GeerGrid grid;
};

RectifiedPair rectify_pair(const CameraRig& rig, const std::string& left_id,
                           const std::string& right_id, const GeerGrid& grid);

// Resamples a camera's ERP panorama onto the pair's GEER grid. The optional
// source mask propagates: an output pixel touching any masked source pixel
// is masked.
PanoImage resample_to_geer(const PanoImage& image, const Pose& pose,
                           const RectifiedPair& pair);
std::pair<PanoImage, ValidityMask> resample_to_geer(
    const PanoImage& image, const ValidityMask& mask, const Pose& pose,
    const RectifiedPair& pair);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit, rig frame
};

// Ray through a pixel of the camera's own ERP panorama.
Ray world_ray_of(const CameraRig& rig, const std::string& cam_id,
                 const PixelCoord& pixel, int width, int height);
// Ray through a pixel of the pair's GEER grid (origin at cam_id's center;
// cam_id must be a member of the pair).
Ray world_ray_of(const CameraRig& rig, const std::string& cam_id,
                 const PixelCoord& pixel, const RectifiedPair& pair);

// JSON rig manifest; doubles survive a save/load round trip bit-exactly.
CameraRig load_rig(const std::filesystem::path& path);
void save_rig(const CameraRig& rig, const std::filesystem::path& path);

}  // namespace mode
