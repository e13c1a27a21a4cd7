#include "support.hpp"

#include <cmath>
#include <random>

namespace quadkit::testing {

Mesh crossing_strip(int chain) {
  std::vector<Vec3> pos{
      {-1, 0, 0}, {0, 0, 0}, {0, 1, 0}, {-1, 1, 0},  // C: 0..3
      {-2, 0, 0}, {-2, 1, 0},                        // L0 west: 4, 5
      {-1, 2, 0}, {0, 2, 0},                         // T north: 6, 7
  };
  std::vector<std::vector<int>> faces{{0, 1, 2, 3}, {4, 0, 3, 5}, {3, 2, 7, 6}};
  // Rungs around vertex 1 (the origin) from angle 90 down to -180 degrees.
  std::vector<int> inner{1}, outer{2};
  const double rho = 0.3;
  for (int k = 1; k < chain; ++k) {
    const double a = (90.0 - 270.0 * k / chain) * kPi / 180.0;
    inner.push_back(static_cast<int>(pos.size()));
    pos.emplace_back(rho * std::cos(a), rho * std::sin(a), 0.0);
    outer.push_back(static_cast<int>(pos.size()));
    pos.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  inner.push_back(1);
  outer.push_back(0);
  for (int k = 1; k <= chain; ++k) {
    faces.push_back({inner[k - 1], outer[k - 1], outer[k], inner[k]});
  }
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

std::string cube_obj(bool triangles) {
  std::string s =
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n";
  const int quads[6][4] = {{1, 4, 3, 2}, {5, 6, 7, 8}, {1, 2, 6, 5},
                           {2, 3, 7, 6}, {3, 4, 8, 7}, {4, 1, 5, 8}};
  for (const auto& q : quads) {
    if (triangles) {
      s += "f " + std::to_string(q[0]) + " " + std::to_string(q[1]) + " " + std::to_string(q[2]) + "\n";
      s += "f " + std::to_string(q[0]) + " " + std::to_string(q[2]) + " " + std::to_string(q[3]) + "\n";
    } else {
      s += "f " + std::to_string(q[0]) + " " + std::to_string(q[1]) + " " + std::to_string(q[2]) +
           " " + std::to_string(q[3]) + "\n";
    }
  }
  return s;
}

std::string fin_obj() {
  return "v 0 0 0\nv 1 0 0\nv 0.5 1 0\nv 0.5 -1 0\nv 0.5 0 1\n"
         "f 1 2 3\nf 2 1 4\nf 1 2 5\n";
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("quadkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace quadkit::testing


namespace quadkit::testing {

Mesh disjoint_union(const Mesh& a, const Mesh& b, const Vec3& offset) {
  auto pos = a.positions();
  auto faces = a.face_polygons();
  const int base = static_cast<int>(pos.size());
  for (const auto& p : b.positions()) pos.push_back(p + offset);
  for (auto f : b.face_polygons()) {
    for (int& v : f) v += base;
    faces.push_back(f);
  }
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh transformed(const Mesh& m, const Eigen::Matrix3d& rotation, double scale, const Vec3& t) {
  auto pos = m.positions();
  for (auto& p : pos) p = scale * (rotation * p) + t;
  return m.with_positions(std::move(pos));
}

Eigen::Matrix3d random_rotation(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

}  // namespace quadkit::testing
