#pragma once

#include <array>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace quadkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

/// Base exception for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input (files, meshes that violate a precondition).
class InputError : public Error {
 public:
  using Error::Error;
};

struct BBox {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool empty() const { return lo.x() > hi.x(); }
  double diagonal() const { return empty() ? 0.0 : (hi - lo).norm(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
};

BBox bounding_box(std::span<const Vec3> points);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c);

/// Newell normal of a closed polygon (unnormalized; length = 2 * projected area).
Vec3 newell_normal(std::span<const Vec3> polygon);

/// Angle between two vectors in radians, in [0, pi]. Zero vectors give 0.
double angle_between(const Vec3& a, const Vec3& b);

struct ClosestPoint {
  Vec3 point;
  double distance_sq = 0.0;
  /// Barycentric weights of `point` w.r.t. (a, b, c).
  Vec3 bary;
};

/// Exact closest point on a triangle (Ericson, Real-Time Collision Detection 5.1.5).
ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                       const Vec3& c);

/// Closest point on a segment; returns the parameter in [0,1].
double closest_param_on_segment(const Vec3& p, const Vec3& a, const Vec3& b);

/// Rigid frame mapping a triangle's plane to the xy-plane with `origin` at (0,0).
struct PlaneFrame {
  Vec3 origin;
  Vec3 u;
  Vec3 v;
  Vec3 n;

  static PlaneFrame of_triangle(const Vec3& a, const Vec3& b, const Vec3& c);
  Vec2 flatten(const Vec3& p) const { return {(p - origin).dot(u), (p - origin).dot(v)}; }
  Vec3 lift(const Vec2& q) const { return origin + q.x() * u + q.y() * v; }
  Vec3 lift_direction(const Vec2& d) const { return d.x() * u + d.y() * v; }
};

inline Vec2 perp(const Vec2& d) { return {-d.y(), d.x()}; }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace quadkit
