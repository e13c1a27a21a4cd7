#include "quadkit/spatial.hpp"

#include <algorithm>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "quadkit/mesh.hpp"

namespace quadkit {
namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using BBox3 = bg::model::box<BPoint>;

namespace {
BPoint to_bpoint(const Vec3& p) { return BPoint(p.x(), p.y(), p.z()); }

// Visits values in increasing distance until `visit` returns false. Asking the rtree for all
// values at once costs a full-size buffer per query, so the request grows geometrically and
// restarts; `reset` clears the caller's state before each pass.
template <class Rtree, class Reset, class Visit>
void visit_nearest(const Rtree& rtree, const BPoint& q, size_t total, Reset reset, Visit visit) {
  for (size_t k = std::min<size_t>(16, total);; k = std::min(2 * k, total)) {
    reset();
    bool stopped = false;
    for (auto it = rtree.qbegin(bgi::nearest(q, static_cast<unsigned>(k))); it != rtree.qend(); ++it) {
      if (!visit(*it)) {
        stopped = true;
        break;
      }
    }
    if (stopped || k == total) return;
  }
}
}  // namespace

struct TriangleIndex::Tree {
  bgi::rtree<std::pair<BBox3, int>, bgi::rstar<16>> rtree;
};

struct PointIndex::Tree {
  bgi::rtree<std::pair<BPoint, int>, bgi::rstar<16>> rtree;
};

TriangleIndex::TriangleIndex(std::vector<std::array<Vec3, 3>> triangles)
    : triangles_(std::move(triangles)) {
  std::vector<std::pair<BBox3, int>> boxes;
  boxes.reserve(triangles_.size());
  for (size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    const Vec3 lo = tri[0].cwiseMin(tri[1]).cwiseMin(tri[2]);
    const Vec3 hi = tri[0].cwiseMax(tri[1]).cwiseMax(tri[2]);
    boxes.emplace_back(BBox3(to_bpoint(lo), to_bpoint(hi)), static_cast<int>(t));
  }
  auto tree = std::make_shared<Tree>();
  tree->rtree = decltype(tree->rtree)(boxes.begin(), boxes.end());
  tree_ = std::move(tree);
}

TriangleIndex::Hit TriangleIndex::closest(const Vec3& p) const {
  Hit best;
  if (!tree_ || triangles_.empty()) throw Error("closest point query on an empty index");
  const BPoint q = to_bpoint(p);
  visit_nearest(
      tree_->rtree, q, triangles_.size(),
      [&] {
        best = Hit{};
        best.distance_sq = std::numeric_limits<double>::infinity();
      },
      [&](const std::pair<BBox3, int>& item) {
        if (bg::comparable_distance(q, item.first) > best.distance_sq) return false;
        const auto& tri = triangles_[item.second];
        const auto cp = closest_point_on_triangle(p, tri[0], tri[1], tri[2]);
        if (cp.distance_sq < best.distance_sq ||
            (cp.distance_sq == best.distance_sq && item.second < best.triangle)) {
          best.triangle = item.second;
          best.point = cp.point;
          best.distance_sq = cp.distance_sq;
          best.bary = cp.bary;
        }
        return true;
      });
  return best;
}

std::vector<std::array<Vec3, 3>> mesh_triangles(const Mesh& mesh, std::vector<int>* owner) {
  std::vector<std::array<Vec3, 3>> tris;
  if (owner) owner->clear();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto vs = mesh.face_vertices(f);
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
      tris.push_back({mesh.position(vs[0]), mesh.position(vs[i]), mesh.position(vs[i + 1])});
      if (owner) owner->push_back(f);
    }
  }
  return tris;
}

PointIndex::PointIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  std::vector<std::pair<BPoint, int>> items;
  items.reserve(points_.size());
  for (size_t i = 0; i < points_.size(); ++i) items.emplace_back(to_bpoint(points_[i]), static_cast<int>(i));
  auto tree = std::make_shared<Tree>();
  tree->rtree = decltype(tree->rtree)(items.begin(), items.end());
  tree_ = std::move(tree);
}

std::vector<int> PointIndex::knn(const Vec3& p, int k, int exclude) const {
  if (!tree_ || k <= 0) return {};
  // Keep going past k while distances tie, so ties can be ordered by id.
  std::vector<std::pair<double, int>> found;
  const BPoint q = to_bpoint(p);
  visit_nearest(
      tree_->rtree, q, points_.size(), [&] { found.clear(); },
      [&](const std::pair<BPoint, int>& item) {
        if (item.second == exclude) return true;
        const double d = (points_[item.second] - p).squaredNorm();
        if (static_cast<int>(found.size()) >= k && d > found.back().first) return false;
        found.emplace_back(d, item.second);
        return true;
      });
  std::sort(found.begin(), found.end());
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(found.size()) && i < k; ++i) out.push_back(found[i].second);
  return out;
}

int PointIndex::nearest(const Vec3& p) const {
  const auto r = knn(p, 1);
  return r.empty() ? -1 : r.front();
}

}  // namespace quadkit
