#pragma once

#include <array>
#include <memory>
#include <vector>

#include "quadkit/geometry.hpp"

namespace quadkit {

class Mesh;

/// Exact closest-point queries over a triangle soup (R-tree over triangle boxes).
/// Equidistant hits resolve to the lowest triangle id.
class TriangleIndex {
 public:
  struct Hit {
    int triangle = -1;
    Vec3 point = Vec3::Zero();
    double distance_sq = 0.0;
    Vec3 bary = Vec3::Zero();
  };

  TriangleIndex() = default;
  explicit TriangleIndex(std::vector<std::array<Vec3, 3>> triangles);

  Hit closest(const Vec3& p) const;
  int size() const { return static_cast<int>(triangles_.size()); }
  const std::array<Vec3, 3>& triangle(int t) const { return triangles_[t]; }

 private:
  struct Tree;
  std::vector<std::array<Vec3, 3>> triangles_;
  std::shared_ptr<const Tree> tree_;
};

/// Fan triangulation of every face; `owner` receives the source face per triangle.
std::vector<std::array<Vec3, 3>> mesh_triangles(const Mesh& mesh, std::vector<int>* owner = nullptr);

/// Nearest-neighbour queries over a point set.
class PointIndex {
 public:
  PointIndex() = default;
  explicit PointIndex(std::vector<Vec3> points);

  /// The k nearest points to p sorted by (distance, id), skipping index `exclude`.
  std::vector<int> knn(const Vec3& p, int k, int exclude = -1) const;
  int nearest(const Vec3& p) const;
  int size() const { return static_cast<int>(points_.size()); }

 private:
  struct Tree;
  std::vector<Vec3> points_;
  std::shared_ptr<const Tree> tree_;
};

}  // namespace quadkit
