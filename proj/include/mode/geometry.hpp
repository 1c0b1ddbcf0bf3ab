#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace mode {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 matrix. Rotations map rig-frame vectors into the local frame:
// x_local = R * x_rig.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    return {{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
        r.m[i * 3 + j] = s;
      }
    return r;
  }
  Mat3 transposed() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
  // Applies the inverse rotation (transpose for orthonormal matrices).
  Vec3 apply_transposed(const Vec3& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
            m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
  }
  bool is_rotation(double tol = 1e-10) const;
};

// rho >= 0; phi in [0, pi] is the elevation angle measured from the +x axis;
// theta in [-pi, pi) is the azimuth around x, measured from +z toward +y.
struct SphericalCoord {
  double rho = 0.0;
  double phi = 0.0;
  double theta = 0.0;
};

// GEER raster: columns sample phi over [0, pi], rows sample theta over
// [-pi, pi) (the wrapping axis). Square angular pixels need height == 2*width.
struct GeerGrid {
  int width = 0;
  int height = 0;
};

// Continuous pixel position; integer coordinates land on pixel centers.
struct PixelCoord {
  double col = 0.0;
  double row = 0.0;
};

// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

SphericalCoord cart_to_sph(const Vec3& p);
Vec3 sph_to_cart(const SphericalCoord& s);

// GEER mapping between angles and pixels. Pixel (r, c) samples the midpoint
// of its angular cell, hence the -0.5 offsets; the two functions are exact
// inverses. geer_dir_of wraps the row, returns a unit-rho direction and
// rejects columns outside [-0.5, width - 0.5] (phi does not wrap).
PixelCoord geer_pixel_of(const SphericalCoord& s, const GeerGrid& g);
SphericalCoord geer_dir_of(const PixelCoord& p, const GeerGrid& g);

// ERP mapping: columns sample theta over [-pi, pi) (the wrapping axis), rows
// sample phi over [0, pi]. Square angular pixels need width == 2*height.
PixelCoord erp_pixel_of(const SphericalCoord& s, int width, int height);
SphericalCoord erp_dir_of(const PixelCoord& p, int width, int height);

// Depth of a point seen at elevation phi_l in the left view of a rectified
// pair with angular disparity d = phi_l - phi_r. Disparities at or below
// d_min signal infinite depth (+inf); a disparity that pushes phi_r out of
// (0, pi) is a geometry error.
double disparity_to_depth(double phi_l, double d, double baseline,
                          double d_min = 1e-9);

// Inverse of disparity_to_depth. Returns nullopt at the blind points
// phi_l == 0 or phi_l == pi where the pair observes no angle difference.
std::optional<double> depth_to_disparity(double phi_l, double rho_l,
                                         double baseline);

}  // namespace mode
