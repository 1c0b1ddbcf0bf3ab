#include "mode/rig.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"

namespace mode {

int CameraRig::index_of(const std::string& id) const {
  for (size_t i = 0; i < cameras.size(); ++i)
    if (cameras[i].id == id) return static_cast<int>(i);
  return -1;
}

const CameraRig::Camera& CameraRig::camera(const std::string& id) const {
  const int i = index_of(id);
  if (i < 0) throw ConfigError("rig: unknown camera id '" + id + "'");
  return cameras[static_cast<size_t>(i)];
}

void CameraRig::validate() const {
  if (cameras.size() < 2) throw DataError("rig: at least 2 cameras required");
  std::set<std::string> ids;
  for (const auto& cam : cameras) {
    if (!ids.insert(cam.id).second)
      throw DataError("rig: duplicate camera id '" + cam.id + "'");
    if (!cam.pose.rotation.is_rotation())
      throw DataError("rig: rotation of '" + cam.id + "' is not orthonormal");
  }
  if (!ids.count(reference_id))
    throw DataError("rig: reference id '" + reference_id + "' not present");
}

RectifiedPair rectify_pair(const CameraRig& rig, const std::string& left_id,
                           const std::string& right_id, const GeerGrid& grid) {
  if (left_id == right_id)
    throw ConfigError("rectify_pair: left and right are the same camera");
  const Vec3 cl = rig.camera(left_id).pose.center;
  const Vec3 cr = rig.camera(right_id).pose.center;
  const Vec3 b = cl - cr;
  const double baseline = b.norm();
  if (baseline <= 0.0)
    throw ConfigError("rectify_pair: coincident camera centers");
  const Vec3 ex = b * (1.0 / baseline);
  // Complete the frame deterministically: keep rig +z as "up" unless the
  // baseline is nearly vertical, then fall back to rig +y.
  Vec3 w{0.0, 0.0, 1.0};
  if (std::abs(w.dot(ex)) > 0.999) w = Vec3{0.0, 1.0, 0.0};
  const Vec3 ez = (w - ex * w.dot(ex)).normalized();
  const Vec3 ey = ez.cross(ex);
  RectifiedPair pair;
  pair.left_id = left_id;
  pair.right_id = right_id;
  pair.baseline = baseline;
  pair.rect_rotation = Mat3::from_rows(ex, ey, ez);
  pair.grid = grid;
  return pair;
}

PanoImage resample_to_geer(const PanoImage& image, const Pose& pose,
                           const RectifiedPair& pair) {
  const GeerGrid& g = pair.grid;
  PanoImage out(g.width, g.height, image.channels, Projection::kGeer);
  parallel_for(0, g.height, [&](int r) {
    for (int c = 0; c < g.width; ++c) {
      const SphericalCoord dir = geer_dir_of({double(c), double(r)}, g);
      const Vec3 v_rig = pair.rect_rotation.apply_transposed(sph_to_cart(dir));
      const Vec3 v_cam = pose.rotation * v_rig;
      const PixelCoord p =
          erp_pixel_of(cart_to_sph(v_cam), image.width, image.height);
      for (int ch = 0; ch < image.channels; ++ch)
        out.at(r, c, ch) = bilinear_sample(image, p, ch);
    }
  });
  return out;
}

std::pair<PanoImage, ValidityMask> resample_to_geer(
    const PanoImage& image, const ValidityMask& mask, const Pose& pose,
    const RectifiedPair& pair) {
  const GeerGrid& g = pair.grid;
  PanoImage out(g.width, g.height, image.channels, Projection::kGeer);
  ValidityMask out_mask(g.width, g.height, true);
  parallel_for(0, g.height, [&](int r) {
    for (int c = 0; c < g.width; ++c) {
      const SphericalCoord dir = geer_dir_of({double(c), double(r)}, g);
      const Vec3 v_rig = pair.rect_rotation.apply_transposed(sph_to_cart(dir));
      const Vec3 v_cam = pose.rotation * v_rig;
      const PixelCoord p =
          erp_pixel_of(cart_to_sph(v_cam), image.width, image.height);
      for (int ch = 0; ch < image.channels; ++ch) {
        float v = 0.0f;
        if (bilinear_plane_masked(image.data.data(), mask, image.width,
                                  image.height, image.channels, ch, p,
                                  WrapAxis::kCols, &v)) {
          out.at(r, c, ch) = v;
        } else {
          out_mask.at(r, c) = 0;
          out.at(r, c, ch) = bilinear_sample(image, p, ch);
        }
      }
    }
  });
  return {std::move(out), std::move(out_mask)};
}

Ray world_ray_of(const CameraRig& rig, const std::string& cam_id,
                 const PixelCoord& pixel, int width, int height) {
  const auto& cam = rig.camera(cam_id);
  const SphericalCoord dir = erp_dir_of(pixel, width, height);
  return {cam.pose.center,
          cam.pose.rotation.apply_transposed(sph_to_cart(dir))};
}

Ray world_ray_of(const CameraRig& rig, const std::string& cam_id,
                 const PixelCoord& pixel, const RectifiedPair& pair) {
  if (cam_id != pair.left_id && cam_id != pair.right_id)
    throw ConfigError("world_ray_of: camera is not a member of the pair");
  const auto& cam = rig.camera(cam_id);
  const SphericalCoord dir = geer_dir_of(pixel, pair.grid);
  return {cam.pose.center,
          pair.rect_rotation.apply_transposed(sph_to_cart(dir))};
}

CameraRig load_rig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_rig: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_rig: " + path.string() + ": " + e.what());
  }
  CameraRig rig;
  try {
    rig.reference_id = j.at("reference_id").get<std::string>();
    for (const auto& jc : j.at("cameras")) {
      CameraRig::Camera cam;
      cam.id = jc.at("id").get<std::string>();
      const auto& c = jc.at("center");
      cam.pose.center = {c.at(0).get<double>(), c.at(1).get<double>(),
                         c.at(2).get<double>()};
      const auto& rot = jc.at("rotation");
      if (rot.size() != 9)
        throw DataError("load_rig: rotation needs 9 entries");
      for (int i = 0; i < 9; ++i)
        cam.pose.rotation.m[static_cast<size_t>(i)] = rot.at(i).get<double>();
      rig.cameras.push_back(std::move(cam));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_rig: " + path.string() + ": " + e.what());
  }
  rig.validate();
  return rig;
}

void save_rig(const CameraRig& rig, const std::filesystem::path& path) {
  nlohmann::json j;
  j["reference_id"] = rig.reference_id;
  j["cameras"] = nlohmann::json::array();
  for (const auto& cam : rig.cameras) {
    nlohmann::json jc;
    jc["id"] = cam.id;
    jc["center"] = {cam.pose.center.x, cam.pose.center.y, cam.pose.center.z};
    jc["rotation"] = cam.pose.rotation.m;
    j["cameras"].push_back(std::move(jc));
  }
  std::ofstream out(path);
  if (!out) throw DataError("save_rig: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace mode
