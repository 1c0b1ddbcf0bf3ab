#include "mode/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace mode {

bool Mat3::is_rotation(double tol) const {
  const Mat3 t = transposed();
  const Mat3 p = *this * t;
  const Mat3 id = Mat3::identity();
  for (int i = 0; i < 9; ++i)
    if (std::abs(p.m[i] - id.m[i]) > tol) return false;
  const double det =
      m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
      m[2] * (m[3] * m[7] - m[4] * m[6]);
  return std::abs(det - 1.0) <= 10.0 * tol;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t - kPi;
}

SphericalCoord cart_to_sph(const Vec3& p) {
  const double rho = p.norm();
  if (rho == 0.0) return {0.0, 0.0, 0.0};
  const double phi = std::acos(std::clamp(p.x / rho, -1.0, 1.0));
  // On the axis (y = z = 0) theta collapses; fix it to 0 so the mapping is
  // deterministic there.
  if (p.y == 0.0 && p.z == 0.0) return {rho, phi, 0.0};
  return {rho, phi, wrap_angle(std::atan2(p.y, p.z))};
}

Vec3 sph_to_cart(const SphericalCoord& s) {
  const double sp = std::sin(s.phi);
  return {s.rho * std::cos(s.phi), s.rho * sp * std::sin(s.theta),
          s.rho * sp * std::cos(s.theta)};
}

PixelCoord geer_pixel_of(const SphericalCoord& s, const GeerGrid& g) {
  return {s.phi * g.width / kPi - 0.5,
          (s.theta + kPi) * g.height / (2.0 * kPi) - 0.5};
}

SphericalCoord geer_dir_of(const PixelCoord& p, const GeerGrid& g) {
  if (!(p.col >= -0.5 && p.col <= g.width - 0.5))
    throw std::domain_error("geer_dir_of: column outside [-0.5, W-0.5]");
  double row = std::fmod(p.row + 0.5, static_cast<double>(g.height));
  if (row < 0.0) row += g.height;
  row -= 0.5;
  const double phi = (p.col + 0.5) * kPi / g.width;
  const double theta = (row + 0.5) * 2.0 * kPi / g.height - kPi;
  return {1.0, phi, theta};
}

PixelCoord erp_pixel_of(const SphericalCoord& s, int width, int height) {
  return {(s.theta + kPi) * width / (2.0 * kPi) - 0.5,
          s.phi * height / kPi - 0.5};
}

SphericalCoord erp_dir_of(const PixelCoord& p, int width, int height) {
  if (!(p.row >= -0.5 && p.row <= height - 0.5))
    throw std::domain_error("erp_dir_of: row outside [-0.5, H-0.5]");
  double col = std::fmod(p.col + 0.5, static_cast<double>(width));
  if (col < 0.0) col += width;
  col -= 0.5;
  const double phi = (p.row + 0.5) * kPi / height;
  const double theta = (col + 0.5) * 2.0 * kPi / width - kPi;
  return {1.0, phi, theta};
}

double disparity_to_depth(double phi_l, double d, double baseline,
                          double d_min) {
  if (baseline <= 0.0)
    throw std::invalid_argument("disparity_to_depth: baseline must be > 0");
  if (d <= d_min) return kInf;
  const double phi_r = phi_l - d;
  if (!(phi_r > 0.0 && phi_r < kPi && phi_l > 0.0 && phi_l <= kPi))
    throw std::domain_error("disparity_to_depth: phi_l - d outside (0, pi)");
  return baseline * std::sin(phi_r) / std::sin(d);
}

std::optional<double> depth_to_disparity(double phi_l, double rho_l,
                                         double baseline) {
  if (rho_l <= 0.0 || baseline <= 0.0)
    throw std::invalid_argument(
        "depth_to_disparity: depth and baseline must be > 0");
  if (phi_l == 0.0 || phi_l == kPi) return std::nullopt;  // blind points
  const double phi_r =
      std::atan2(rho_l * std::sin(phi_l), rho_l * std::cos(phi_l) + baseline);
  return phi_l - phi_r;
}

}  // namespace mode
