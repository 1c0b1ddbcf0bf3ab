#include "mode/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mode/errors.hpp"
#include "mode/parallel.hpp"

namespace mode {

namespace {

constexpr double kRayEps = 1e-9;

double intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& center,
                        double radius) {
  const Vec3 oc = o - center;
  const double b = d.dot(oc);
  const double c = oc.dot(oc) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return kInf;
  const double s = std::sqrt(disc);
  const double t0 = -b - s;
  if (t0 > kRayEps) return t0;
  const double t1 = -b + s;  // shell seen from inside
  return t1 > kRayEps ? t1 : kInf;
}

double intersect_plane(const Vec3& o, const Vec3& d, const Vec3& point,
                       const Vec3& normal) {
  const double denom = d.dot(normal);
  if (std::abs(denom) < 1e-12) return kInf;
  const double t = (point - o).dot(normal) / denom;
  return t > kRayEps ? t : kInf;
}

double intersect_box(const Vec3& o, const Vec3& d, const Vec3& mn,
                     const Vec3& mx) {
  double tmin = -kInf, tmax = kInf;
  const double ov[3] = {o.x, o.y, o.z};
  const double dv[3] = {d.x, d.y, d.z};
  const double mnv[3] = {mn.x, mn.y, mn.z};
  const double mxv[3] = {mx.x, mx.y, mx.z};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(dv[i]) < 1e-15) {
      if (ov[i] < mnv[i] || ov[i] > mxv[i]) return kInf;
      continue;
    }
    double t0 = (mnv[i] - ov[i]) / dv[i];
    double t1 = (mxv[i] - ov[i]) / dv[i];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return kInf;
  }
  if (tmin > kRayEps) return tmin;
  return tmax > kRayEps ? tmax : kInf;
}

Vec3 box_normal(const Vec3& p, const Vec3& mn, const Vec3& mx) {
  const Vec3 center = (mn + mx) * 0.5;
  const Vec3 half = (mx - mn) * 0.5;
  const Vec3 rel{(p.x - center.x) / half.x, (p.y - center.y) / half.y,
                 (p.z - center.z) / half.z};
  const double ax = std::abs(rel.x), ay = std::abs(rel.y),
               az = std::abs(rel.z);
  if (ax >= ay && ax >= az) return {rel.x > 0 ? 1.0 : -1.0, 0.0, 0.0};
  if (ay >= az) return {0.0, rel.y > 0 ? 1.0 : -1.0, 0.0};
  return {0.0, 0.0, rel.z > 0 ? 1.0 : -1.0};
}

bool box_contains(const Vec3& p, const Vec3& mn, const Vec3& mx) {
  return p.x > mn.x && p.x < mx.x && p.y > mn.y && p.y < mx.y && p.z > mn.z &&
         p.z < mx.z;
}

Vec3 jvec(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Texture parse_texture(const nlohmann::json& j) {
  Texture tex;
  const std::string kind = j.value("kind", "solid");
  if (kind == "solid") {
    tex.kind = Texture::Kind::kSolid;
    if (j.contains("color")) tex.color_a = jvec(j.at("color"));
  } else if (kind == "checker") {
    tex.kind = Texture::Kind::kChecker;
    if (j.contains("color_a")) tex.color_a = jvec(j.at("color_a"));
    if (j.contains("color_b")) tex.color_b = jvec(j.at("color_b"));
    tex.scale = j.value("scale", 1.0);
    if (tex.scale <= 0.0) throw DataError("scene: checker scale must be > 0");
  } else {
    throw DataError("scene: unknown texture kind '" + kind + "'");
  }
  return tex;
}

}  // namespace

Vec3 Texture::albedo_at(const Vec3& p) const {
  if (kind == Kind::kSolid) return color_a;
  const long long parity =
      static_cast<long long>(std::floor(p.x / scale)) +
      static_cast<long long>(std::floor(p.y / scale)) +
      static_cast<long long>(std::floor(p.z / scale));
  return (parity & 1) == 0 ? color_a : color_b;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_scene: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_scene: " + path.string() + ": " + e.what());
  }
  Scene scene;
  try {
    if (j.contains("background")) scene.background = jvec(j.at("background"));
    if (j.contains("light")) {
      const auto& jl = j.at("light");
      if (jl.contains("direction"))
        scene.light.direction = jvec(jl.at("direction")).normalized();
      scene.light.ambient = jl.value("ambient", 0.3);
    }
    for (const auto& jp : j.at("primitives")) {
      Primitive prim;
      const std::string kind = jp.at("kind").get<std::string>();
      if (kind == "sphere") {
        prim.kind = Primitive::Kind::kSphere;
        prim.a = jvec(jp.at("center"));
        prim.radius = jp.at("radius").get<double>();
        if (prim.radius <= 0.0)
          throw DataError("scene: sphere radius must be > 0");
      } else if (kind == "plane") {
        prim.kind = Primitive::Kind::kPlane;
        prim.a = jvec(jp.at("point"));
        prim.b = jvec(jp.at("normal")).normalized();
      } else if (kind == "box") {
        prim.kind = Primitive::Kind::kBox;
        prim.a = jvec(jp.at("min"));
        prim.b = jvec(jp.at("max"));
        if (!(prim.a.x < prim.b.x && prim.a.y < prim.b.y &&
              prim.a.z < prim.b.z))
          throw DataError("scene: box min must be below max componentwise");
      } else {
        throw DataError("scene: unknown primitive kind '" + kind + "'");
      }
      if (jp.contains("texture")) prim.texture = parse_texture(jp.at("texture"));
      scene.primitives.push_back(prim);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_scene: " + path.string() + ": " + e.what());
  }
  return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  nlohmann::json j;
  j["background"] = {scene.background.x, scene.background.y,
                     scene.background.z};
  j["light"] = {{"direction",
                 {scene.light.direction.x, scene.light.direction.y,
                  scene.light.direction.z}},
                {"ambient", scene.light.ambient}};
  j["primitives"] = nlohmann::json::array();
  for (const auto& prim : scene.primitives) {
    nlohmann::json jp;
    switch (prim.kind) {
      case Primitive::Kind::kSphere:
        jp["kind"] = "sphere";
        jp["center"] = {prim.a.x, prim.a.y, prim.a.z};
        jp["radius"] = prim.radius;
        break;
      case Primitive::Kind::kPlane:
        jp["kind"] = "plane";
        jp["point"] = {prim.a.x, prim.a.y, prim.a.z};
        jp["normal"] = {prim.b.x, prim.b.y, prim.b.z};
        break;
      case Primitive::Kind::kBox:
        jp["kind"] = "box";
        jp["min"] = {prim.a.x, prim.a.y, prim.a.z};
        jp["max"] = {prim.b.x, prim.b.y, prim.b.z};
        break;
    }
    nlohmann::json jt;
    if (prim.texture.kind == Texture::Kind::kSolid) {
      jt["kind"] = "solid";
      jt["color"] = {prim.texture.color_a.x, prim.texture.color_a.y,
                     prim.texture.color_a.z};
    } else {
      jt["kind"] = "checker";
      jt["color_a"] = {prim.texture.color_a.x, prim.texture.color_a.y,
                       prim.texture.color_a.z};
      jt["color_b"] = {prim.texture.color_b.x, prim.texture.color_b.y,
                       prim.texture.color_b.z};
      jt["scale"] = prim.texture.scale;
    }
    jp["texture"] = std::move(jt);
    j["primitives"].push_back(std::move(jp));
  }
  std::ofstream out(path);
  if (!out) throw DataError("save_scene: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

std::optional<Hit> intersect_scene(const Scene& scene, const Vec3& origin,
                                   const Vec3& dir) {
  Hit hit;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    const Primitive& prim = scene.primitives[i];
    double t = kInf;
    switch (prim.kind) {
      case Primitive::Kind::kSphere:
        t = intersect_sphere(origin, dir, prim.a, prim.radius);
        break;
      case Primitive::Kind::kPlane:
        t = intersect_plane(origin, dir, prim.a, prim.b);
        break;
      case Primitive::Kind::kBox:
        t = intersect_box(origin, dir, prim.a, prim.b);
        break;
    }
    if (t < hit.t) {
      hit.t = t;
      hit.primitive = static_cast<int>(i);
    }
  }
  if (hit.primitive < 0) return std::nullopt;
  hit.point = origin + dir * hit.t;
  const Primitive& prim = scene.primitives[static_cast<size_t>(hit.primitive)];
  switch (prim.kind) {
    case Primitive::Kind::kSphere:
      hit.normal = (hit.point - prim.a) * (1.0 / prim.radius);
      break;
    case Primitive::Kind::kPlane:
      hit.normal = prim.b;
      break;
    case Primitive::Kind::kBox:
      hit.normal = box_normal(hit.point, prim.a, prim.b);
      break;
  }
  if (hit.normal.dot(dir) > 0.0) hit.normal = -hit.normal;  // two-sided
  return hit;
}

RenderResult render_panorama(const Scene& scene, const Vec3& origin,
                             const Mat3& frame_rotation, int width, int height,
                             Projection projection) {
  for (const auto& prim : scene.primitives)
    if (prim.kind == Primitive::Kind::kBox &&
        box_contains(origin, prim.a, prim.b))
      throw ConfigError("render_panorama: camera inside a box primitive");

  RenderResult res;
  res.rgb = PanoImage(width, height, 3, projection);
  res.depth = FloatMap(width, height, "m", kInvalidValue);
  const Vec3 light = scene.light.direction.normalized();
  parallel_for(0, height, [&](int r) {
    for (int c = 0; c < width; ++c) {
      const PixelCoord px{double(c), double(r)};
      const SphericalCoord s =
          projection == Projection::kGeer
              ? geer_dir_of(px, GeerGrid{width, height})
              : erp_dir_of(px, width, height);
      const Vec3 dir = frame_rotation.apply_transposed(sph_to_cart(s));
      const auto hit = intersect_scene(scene, origin, dir);
      Vec3 color = scene.background;
      if (hit) {
        res.depth.at(r, c) = static_cast<float>(hit->t);
        const Primitive& prim =
            scene.primitives[static_cast<size_t>(hit->primitive)];
        const double lambert = std::max(0.0, hit->normal.dot(light));
        const double shade =
            scene.light.ambient + (1.0 - scene.light.ambient) * lambert;
        color = prim.texture.albedo_at(hit->point) * shade;
      }
      res.rgb.at(r, c, 0) = static_cast<float>(std::clamp(color.x, 0.0, 1.0));
      res.rgb.at(r, c, 1) = static_cast<float>(std::clamp(color.y, 0.0, 1.0));
      res.rgb.at(r, c, 2) = static_cast<float>(std::clamp(color.z, 0.0, 1.0));
    }
  });
  return res;
}

RenderResult render_camera_erp(const Scene& scene, const CameraRig& rig,
                               const std::string& cam_id, int width,
                               int height) {
  const auto& cam = rig.camera(cam_id);
  return render_panorama(scene, cam.pose.center, cam.pose.rotation, width,
                         height, Projection::kErp);
}

RenderResult render_pair_geer(const Scene& scene, const CameraRig& rig,
                              const RectifiedPair& pair, bool left) {
  const auto& cam = rig.camera(left ? pair.left_id : pair.right_id);
  return render_panorama(scene, cam.pose.center, pair.rect_rotation,
                         pair.grid.width, pair.grid.height, Projection::kGeer);
}

FloatMap render_gt_disparity(const FloatMap& left_geer_depth,
                             const RectifiedPair& pair, int blind_margin) {
  const GeerGrid& g = pair.grid;
  FloatMap disp(g.width, g.height, "px", kInvalidValue);
  const double px_per_rad = g.width / kPi;
  for (int c = 0; c < g.width; ++c) {
    if (c < blind_margin || c >= g.width - blind_margin) continue;
    const double phi_l = (c + 0.5) * kPi / g.width;
    for (int r = 0; r < g.height; ++r) {
      const float rho = left_geer_depth.at(r, c);
      if (!std::isfinite(rho)) continue;
      const auto d = depth_to_disparity(phi_l, rho, pair.baseline);
      if (d) disp.at(r, c) = static_cast<float>(*d * px_per_rad);
    }
  }
  return disp;
}

ValidityMask occlusion_mask(const Scene& scene, const CameraRig& rig,
                            const RectifiedPair& pair,
                            const FloatMap& left_geer_depth) {
  const GeerGrid& g = pair.grid;
  const Vec3 cl = rig.camera(pair.left_id).pose.center;
  const Vec3 cr = rig.camera(pair.right_id).pose.center;
  ValidityMask visible(g.width, g.height, true);
  parallel_for(0, g.height, [&](int r) {
    for (int c = 0; c < g.width; ++c) {
      const float rho = left_geer_depth.at(r, c);
      if (!std::isfinite(rho)) continue;
      const SphericalCoord s = geer_dir_of({double(c), double(r)}, g);
      const Vec3 dir = pair.rect_rotation.apply_transposed(sph_to_cart(s));
      const Vec3 p = cl + dir * rho;
      const Vec3 to_p = p - cr;
      const double dist = to_p.norm();
      if (dist < 1e-9) continue;
      const auto hit = intersect_scene(scene, cr, to_p * (1.0 / dist));
      if (hit && hit->t < dist * 0.99) visible.at(r, c) = 0;
    }
  });
  return visible;
}

// ---------------------------------------------------------------------------
// Soiling

namespace {

// splitmix64; the standard <random> distributions are not pinned across
// library implementations, this is.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

double coverage_of(const ValidityMask& affected) {
  return static_cast<double>(affected.count_valid()) /
         static_cast<double>(affected.data.size());
}

int wrap_col(int c, int w) {
  int m = c % w;
  if (m < 0) m += w;
  return m;
}

// Paints an ellipse, wrapping on the azimuth axis of the projection.
template <typename Fn>
void for_ellipse(const PanoImage& img, double cx, double cy, double rx,
                 double ry, double angle, Fn&& fn) {
  const bool wrap_cols = wrap_axis_of(img.projection) == WrapAxis::kCols;
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double rmax = std::max(rx, ry);
  const int c0 = static_cast<int>(std::floor(cx - rmax));
  const int c1 = static_cast<int>(std::ceil(cx + rmax));
  const int r0 = std::max(0, static_cast<int>(std::floor(cy - rmax)));
  const int r1 =
      std::min(img.height - 1, static_cast<int>(std::ceil(cy + rmax)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const double dx = c - cx, dy = r - cy;
      const double u = (dx * ca + dy * sa) / rx;
      const double v = (-dx * sa + dy * ca) / ry;
      if (u * u + v * v > 1.0) continue;
      int cc = c, rr = r;
      if (wrap_cols) {
        cc = wrap_col(c, img.width);
      } else {
        if (c < 0 || c >= img.width) continue;
        rr = (r % img.height + img.height) % img.height;
      }
      fn(rr, cc);
    }
}

PanoImage box_blur(const PanoImage& img, int radius, int passes) {
  PanoImage cur = img;
  const bool wrap_cols = wrap_axis_of(img.projection) == WrapAxis::kCols;
  for (int pass = 0; pass < passes; ++pass) {
    PanoImage horiz = cur;
    for (int r = 0; r < cur.height; ++r)
      for (int c = 0; c < cur.width; ++c)
        for (int ch = 0; ch < cur.channels; ++ch) {
          double sum = 0.0;
          for (int k = -radius; k <= radius; ++k) {
            const int cc = wrap_cols ? wrap_col(c + k, cur.width)
                                     : std::clamp(c + k, 0, cur.width - 1);
            sum += cur.at(r, cc, ch);
          }
          horiz.at(r, c, ch) = static_cast<float>(sum / (2 * radius + 1));
        }
    PanoImage vert = horiz;
    for (int r = 0; r < cur.height; ++r)
      for (int c = 0; c < cur.width; ++c)
        for (int ch = 0; ch < cur.channels; ++ch) {
          double sum = 0.0;
          for (int k = -radius; k <= radius; ++k) {
            const int rr =
                wrap_cols ? std::clamp(r + k, 0, cur.height - 1)
                          : ((r + k) % cur.height + cur.height) % cur.height;
            sum += horiz.at(rr, c, ch);
          }
          vert.at(r, c, ch) = static_cast<float>(sum / (2 * radius + 1));
        }
    cur = std::move(vert);
  }
  return cur;
}

}  // namespace

std::pair<PanoImage, ValidityMask> apply_soiling(const PanoImage& img,
                                                 const SoilSpec& spec) {
  if (spec.coverage >= 0.9 || spec.coverage < 0.0)
    throw ConfigError("apply_soiling: coverage must be in [0, 0.9)");
  PanoImage out = img;
  ValidityMask affected(img.width, img.height, false);
  if (spec.coverage == 0.0) return {std::move(out), std::move(affected)};

  Rng rng(spec.seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
  const int max_blobs = 10000;

  if (spec.kind == SoilSpec::Kind::kMud) {
    for (int i = 0; i < max_blobs && coverage_of(affected) < spec.coverage;
         ++i) {
      const double cx = rng.uniform(0.0, img.width);
      const double cy = rng.uniform(0.0, img.height);
      const double rx = rng.uniform(spec.min_radius, spec.max_radius);
      const double ry = rng.uniform(spec.min_radius, spec.max_radius);
      const double ang = rng.uniform(0.0, kPi);
      const float dark = static_cast<float>(rng.uniform(0.01, 0.08));
      for_ellipse(img, cx, cy, rx, ry, ang, [&](int r, int c) {
        for (int ch = 0; ch < out.channels; ++ch)
          out.at(r, c, ch) = dark * (ch == 0 ? 1.0f : 0.85f);
        affected.at(r, c) = 1;
      });
    }
  } else if (spec.kind == SoilSpec::Kind::kWater) {
    const PanoImage blurred =
        box_blur(img, std::max(1, static_cast<int>(spec.blur_radius)), 3);
    for (int i = 0; i < max_blobs && coverage_of(affected) < spec.coverage;
         ++i) {
      const double cx = rng.uniform(0.0, img.width);
      const double cy = rng.uniform(0.0, img.height);
      const double rr = rng.uniform(spec.min_radius, spec.max_radius);
      for_ellipse(img, cx, cy, rr, rr, 0.0, [&](int r, int c) {
        for (int ch = 0; ch < out.channels; ++ch)
          out.at(r, c, ch) = blurred.at(r, c, ch);
        affected.at(r, c) = 1;
      });
    }
  } else {  // glare
    for (int i = 0; i < max_blobs && coverage_of(affected) < spec.coverage;
         ++i) {
      const double cx = rng.uniform(0.0, img.width);
      const double cy = rng.uniform(0.0, img.height);
      const double rr = rng.uniform(2.0 * spec.min_radius,
                                    2.0 * spec.max_radius);
      // Additive radial field, clipped at 1, wrapping on the azimuth axis.
      const int ri = static_cast<int>(rr) + 1;
      for (int dy = -ri; dy <= ri; ++dy)
        for (int dx = -ri; dx <= ri; ++dx) {
          const double dist2 = double(dx) * dx + double(dy) * dy;
          if (dist2 > rr * rr) continue;
          int r = static_cast<int>(std::lround(cy)) + dy;
          int c = static_cast<int>(std::lround(cx)) + dx;
          if (wrap_axis_of(img.projection) == WrapAxis::kCols) {
            if (r < 0 || r >= img.height) continue;
            c = wrap_col(c, img.width);
          } else {
            if (c < 0 || c >= img.width) continue;
            r = (r % img.height + img.height) % img.height;
          }
          const double fall = 1.0 - dist2 / (rr * rr);
          const float add =
              static_cast<float>(spec.glare_gain * fall * fall);
          for (int ch = 0; ch < out.channels; ++ch)
            out.at(r, c, ch) = std::min(1.0f, out.at(r, c, ch) + add);
          affected.at(r, c) = 1;
        }
    }
  }
  return {std::move(out), std::move(affected)};
}

}  // namespace mode
