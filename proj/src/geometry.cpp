#include "quadkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace quadkit {

BBox bounding_box(std::span<const Vec3> points) {
  BBox box;
  for (const auto& p : points) box.extend(p);
  return box;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

Vec3 newell_normal(std::span<const Vec3> polygon) {
  Vec3 n = Vec3::Zero();
  const size_t k = polygon.size();
  for (size_t i = 0; i < k; ++i) {
    const Vec3& a = polygon[i];
    const Vec3& b = polygon[(i + 1) % k];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  // atan2 form stays accurate near 0 and pi.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                       const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  auto done = [&](double u, double v, double w) {
    ClosestPoint r;
    r.point = u * a + v * b + w * c;
    r.distance_sq = (p - r.point).squaredNorm();
    r.bary = Vec3(u, v, w);
    return r;
  };
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return done(1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return done(0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return done(1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return done(0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return done(1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return done(0, 1 - w, w);
  }

  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate triangle: fall back to the closest of its edges.
    ClosestPoint best = done(1, 0, 0);
    const std::array<std::pair<int, int>, 3> edges{{{0, 1}, {1, 2}, {0, 2}}};
    const std::array<Vec3, 3> pts{a, b, c};
    for (auto [i, j] : edges) {
      const double t = closest_param_on_segment(p, pts[i], pts[j]);
      Vec3 w = Vec3::Zero();
      w[i] = 1 - t;
      w[j] = t;
      ClosestPoint cand = done(w[0], w[1], w[2]);
      if (cand.distance_sq < best.distance_sq) best = cand;
    }
    return best;
  }
  const double v = vb / denom;
  const double w = vc / denom;
  return done(1 - v - w, v, w);
}

double closest_param_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return 0.0;
  return std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
}

PlaneFrame PlaneFrame::of_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  PlaneFrame f;
  f.origin = a;
  Vec3 e = b - a;
  const double len = e.norm();
  f.u = len > 0.0 ? Vec3(e / len) : Vec3::UnitX();
  Vec3 n = (b - a).cross(c - a);
  if (n.norm() == 0.0) {
    n = f.u.unitOrthogonal();
  }
  f.n = n.normalized();
  f.v = f.n.cross(f.u);
  return f;
}

}  // namespace quadkit
