#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "mode/rig.hpp"

namespace mode {

struct Texture {
  enum class Kind { kSolid, kChecker };
  Kind kind = Kind::kSolid;
  Vec3 color_a{0.8, 0.8, 0.8};
  Vec3 color_b{0.2, 0.2, 0.2};
  double scale = 1.0;  // checker cell edge, meters (world space)

  Vec3 albedo_at(const Vec3& p) const;
};

struct Primitive {
  enum class Kind { kSphere, kPlane, kBox };
  Kind kind = Kind::kSphere;
  // sphere: a = center, radius; plane: a = point, b = unit normal;
  // box: a = min corner, b = max corner.
  Vec3 a, b;
  double radius = 1.0;
  Texture texture;
};

struct DirectionalLight {
  Vec3 direction{0.3, 0.4, 0.85};  // toward the light, normalized on load
  double ambient = 0.3;
};

struct Scene {
  std::vector<Primitive> primitives;
  DirectionalLight light;
  Vec3 background{0.05, 0.05, 0.07};
};

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

struct Hit {
  double t = kInf;
  int primitive = -1;
  Vec3 point;
  Vec3 normal;
};

// Nearest intersection along a unit-direction ray, or nullopt on miss.
std::optional<Hit> intersect_scene(const Scene& scene, const Vec3& origin,
                                   const Vec3& dir);

struct RenderResult {
  PanoImage rgb;
  FloatMap depth;  // meters, +inf where the ray escapes the scene
};

// Lambert-shaded panorama from `origin`, pixel directions taken in the frame
// given by `frame_rotation` (rig -> frame). Spheres and planes are two-sided
// shells; a camera strictly inside a box is rejected.
RenderResult render_panorama(const Scene& scene, const Vec3& origin,
                             const Mat3& frame_rotation, int width, int height,
                             Projection projection);
// Convenience wrappers: a camera's own ERP view, and the left/right GEER
// views of a rectified pair.
RenderResult render_camera_erp(const Scene& scene, const CameraRig& rig,
                               const std::string& cam_id, int width,
                               int height);
RenderResult render_pair_geer(const Scene& scene, const CameraRig& rig,
                              const RectifiedPair& pair, bool left);

// Ground-truth angular disparity (in pixels) from a depth map rendered in the
// pair's left GEER frame. Blind margin columns and invalid depths are +inf.
FloatMap render_gt_disparity(const FloatMap& left_geer_depth,
                             const RectifiedPair& pair, int blind_margin = 0);

// Valid = visible from the right camera too. A left pixel is occlusion-
// flagged when the right camera's ray toward its 3D point hits a surface
// more than 1% nearer.
ValidityMask occlusion_mask(const Scene& scene, const CameraRig& rig,
                            const RectifiedPair& pair,
                            const FloatMap& left_geer_depth);

struct SoilSpec {
  enum class Kind { kMud, kWater, kGlare };
  Kind kind = Kind::kMud;
  uint64_t seed = 0;
  double coverage = 0.3;    // target affected fraction, < 0.9
  double min_radius = 6.0;  // blob radius range, pixels
  double max_radius = 20.0;
  double blur_radius = 6.0;  // water drop blur, pixels
  double glare_gain = 0.9;
};

// Deterministic soiling: output is a pure function of image dims and spec.
// Pixels outside the returned mask (mask = affected) are untouched.
std::pair<PanoImage, ValidityMask> apply_soiling(const PanoImage& img,
                                                 const SoilSpec& spec);

}  // namespace mode
