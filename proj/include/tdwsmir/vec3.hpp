#pragma once

#include <array>
#include <cmath>

namespace tdw {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Unit vector for polar angle theta (from +z) and azimuth phi (from +x toward +y).
inline Vec3 unit_vector(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

struct SphericalAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Direction angles of a non-zero vector; phi is in [0, 2pi).
inline SphericalAngles direction_angles(const Vec3& v) {
  const double r = norm(v);
  double ct = v[2] / r;
  ct = ct > 1.0 ? 1.0 : (ct < -1.0 ? -1.0 : ct);
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += 2.0 * M_PI;
  return {std::acos(ct), phi};
}

}  // namespace tdw
