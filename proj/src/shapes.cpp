#include "quadkit/shapes.hpp"

#include <cmath>
#include <map>
#include <random>
#include <tuple>

namespace quadkit {

Mesh subdivide_quads(const std::vector<Vec3>& positions, const std::vector<std::array<int, 4>>& quads,
                     int k) {
  if (k < 1) throw Error("subdivide_quads: k must be positive");
  std::vector<Vec3> out_pos;
  std::map<std::tuple<int, int, int, int>, int> ids;  // (kind, a, b, index)
  auto vertex = [&](std::tuple<int, int, int, int> key, const Vec3& p) {
    auto [it, inserted] = ids.emplace(key, static_cast<int>(out_pos.size()));
    if (inserted) out_pos.push_back(p);
    return it->second;
  };
  auto edge_point = [&](int u, int w, int i) {
    // i steps from u toward w; keyed from the lower endpoint so both faces agree.
    if (i == 0) return vertex({0, u, 0, 0}, positions[u]);
    if (i == k) return vertex({0, w, 0, 0}, positions[w]);
    if (u > w) {
      std::swap(u, w);
      i = k - i;
    }
    const double t = static_cast<double>(i) / k;
    return vertex({1, u, w, i}, positions[u] + t * (positions[w] - positions[u]));
  };

  std::vector<std::vector<int>> faces;
  for (size_t q = 0; q < quads.size(); ++q) {
    const auto [a, b, c, d] = quads[q];
    std::vector<int> grid((k + 1) * (k + 1));
    for (int t = 0; t <= k; ++t) {
      for (int s = 0; s <= k; ++s) {
        int id;
        if (t == 0) {
          id = edge_point(a, b, s);
        } else if (t == k) {
          id = edge_point(d, c, s);
        } else if (s == 0) {
          id = edge_point(a, d, t);
        } else if (s == k) {
          id = edge_point(b, c, t);
        } else {
          const double u = static_cast<double>(s) / k;
          const double v = static_cast<double>(t) / k;
          const Vec3 p = (1 - u) * (1 - v) * positions[a] + u * (1 - v) * positions[b] +
                         u * v * positions[c] + (1 - u) * v * positions[d];
          id = vertex({2, static_cast<int>(q), s, t}, p);
        }
        grid[t * (k + 1) + s] = id;
      }
    }
    for (int t = 0; t < k; ++t) {
      for (int s = 0; s < k; ++s) {
        faces.push_back({grid[t * (k + 1) + s], grid[t * (k + 1) + s + 1],
                         grid[(t + 1) * (k + 1) + s + 1], grid[(t + 1) * (k + 1) + s]});
      }
    }
  }
  return Mesh::from_polygons(std::move(out_pos), std::move(faces));
}

Mesh grid_patch(int m, int n, double width, double height) {
  std::vector<Vec3> pos;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= m; ++i) pos.emplace_back(width * i / m, height * j / n, 0.0);
  }
  std::vector<std::vector<int>> faces;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const int v = j * (m + 1) + i;
      faces.push_back({v, v + 1, v + m + 2, v + m + 1});
    }
  }
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh polycube(const std::vector<std::array<int, 3>>& voxels, int k, double scale) {
  std::map<std::array<int, 3>, int> occupied;
  for (const auto& v : voxels) occupied[v] = 1;
  std::map<std::array<int, 3>, int> corner_ids;
  std::vector<Vec3> positions;
  auto corner = [&](std::array<int, 3> p) {
    auto [it, inserted] = corner_ids.emplace(p, static_cast<int>(positions.size()));
    if (inserted) positions.emplace_back(scale * p[0], scale * p[1], scale * p[2]);
    return it->second;
  };
  std::vector<std::array<int, 4>> quads;
  for (const auto& v : voxels) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int sign : {1, -1}) {
        auto nb = v;
        nb[axis] += sign;
        if (occupied.count(nb)) continue;
        const int b = (axis + 1) % 3;
        const int c = (axis + 2) % 3;
        auto base = v;
        if (sign > 0) base[axis] += 1;
        auto offset = [&](int db, int dc) {
          auto p = base;
          p[b] += db;
          p[c] += dc;
          return corner(p);
        };
        if (sign > 0) {
          quads.push_back({offset(0, 0), offset(1, 0), offset(1, 1), offset(0, 1)});
        } else {
          quads.push_back({offset(0, 0), offset(0, 1), offset(1, 1), offset(1, 0)});
        }
      }
    }
  }
  return subdivide_quads(positions, quads, k);
}

Mesh cube(int k) {
  const Mesh m = polycube({{0, 0, 0}}, k, 2.0);
  auto pos = m.positions();
  for (auto& p : pos) p -= Vec3::Ones();
  return m.with_positions(std::move(pos));
}

Mesh box(int sx, int sy, int sz, int k) {
  std::vector<std::array<int, 3>> voxels;
  for (int x = 0; x < sx; ++x) {
    for (int y = 0; y < sy; ++y) {
      for (int z = 0; z < sz; ++z) voxels.push_back({x, y, z});
    }
  }
  return polycube(voxels, k);
}

Mesh l_bracket(int k) { return polycube({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, k); }

Mesh cube_sphere(int k) {
  const Mesh m = cube(k);
  auto pos = m.positions();
  for (auto& p : pos) p.normalize();
  return m.with_positions(std::move(pos));
}

Mesh cylinder(int around, int along, double radius, double height) {
  std::vector<Vec3> pos;
  for (int j = 0; j <= along; ++j) {
    for (int i = 0; i < around; ++i) {
      const double a = 2.0 * kPi * i / around;
      pos.emplace_back(radius * std::cos(a), radius * std::sin(a), height * j / along);
    }
  }
  std::vector<std::vector<int>> faces;
  for (int j = 0; j < along; ++j) {
    for (int i = 0; i < around; ++i) {
      const int i1 = (i + 1) % around;
      faces.push_back({j * around + i, j * around + i1, (j + 1) * around + i1, (j + 1) * around + i});
    }
  }
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh torus(int nu, int nv, double major, double minor) {
  std::vector<Vec3> pos;
  for (int j = 0; j < nv; ++j) {
    const double b = 2.0 * kPi * j / nv;
    for (int i = 0; i < nu; ++i) {
      const double a = 2.0 * kPi * i / nu;
      const double r = major + minor * std::cos(b);
      pos.emplace_back(r * std::cos(a), r * std::sin(a), minor * std::sin(b));
    }
  }
  std::vector<std::vector<int>> faces;
  for (int j = 0; j < nv; ++j) {
    const int j1 = (j + 1) % nv;
    for (int i = 0; i < nu; ++i) {
      const int i1 = (i + 1) % nu;
      faces.push_back({j * nu + i, j * nu + i1, j1 * nu + i1, j1 * nu + i});
    }
  }
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh star_patch(int sides, int k) {
  std::vector<Vec3> pos{Vec3::Zero()};
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * kPi * i / sides;
    pos.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  for (int i = 0; i < sides; ++i) pos.push_back(0.5 * (pos[1 + i] + pos[1 + (i + 1) % sides]));
  std::vector<std::array<int, 4>> quads;
  for (int i = 0; i < sides; ++i) {
    const int prev_mid = 1 + sides + (i + sides - 1) % sides;
    quads.push_back({0, prev_mid, 1 + i, 1 + sides + i});
  }
  return subdivide_quads(pos, quads, k);
}

Mesh helical_cylinder(int around, int turns, double radius, double pitch) {
  std::vector<Vec3> pos;
  const int count = around * (turns + 1) + 1;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * kPi * i / around;
    pos.emplace_back(radius * std::cos(a), radius * std::sin(a), pitch * i / around);
  }
  std::vector<std::vector<int>> faces;
  for (int i = 0; i < around * turns; ++i) faces.push_back({i, i + 1, i + 1 + around, i + around});
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> tris{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : pos) p.normalize();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pos.push_back((0.5 * (pos[a] + pos[b])).normalized());
      const int id = static_cast<int>(pos.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& [a, b, c] : tris) {
      const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  std::vector<std::vector<int>> faces;
  for (const auto& [a, b, c] : tris) faces.push_back({a, b, c});
  return Mesh::from_polygons(std::move(pos), std::move(faces));
}

Mesh triangulate_quads(const Mesh& mesh, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> faces;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto v = mesh.face_vertices(f);
    if (v.size() == 4) {
      if (rng() & 1) {
        faces.push_back({v[0], v[1], v[2]});
        faces.push_back({v[0], v[2], v[3]});
      } else {
        faces.push_back({v[1], v[2], v[3]});
        faces.push_back({v[1], v[3], v[0]});
      }
    } else {
      for (size_t i = 1; i + 1 < v.size(); ++i) faces.push_back({v[0], v[i], v[i + 1]});
    }
  }
  return Mesh::from_polygons(mesh.positions(), std::move(faces));
}

std::vector<NamedMesh> desk_corpus() {
  std::vector<NamedMesh> out;
  out.push_back({"grid-patch", grid_patch(8, 8)});
  out.push_back({"cube-2x2", cube(2)});
  out.push_back({"cube-4x4", cube(4)});
  out.push_back({"cylinder", cylinder(16, 6)});
  out.push_back({"torus", torus(24, 12)});
  out.push_back({"cube-sphere", cube_sphere(4)});
  out.push_back({"l-bracket", l_bracket(2)});
  out.push_back({"box-3x2x1", box(3, 2, 1, 2)});
  out.push_back({"tri-patch", star_patch(3, 4)});
  out.push_back({"penta-patch", star_patch(5, 4)});
  return out;
}

}  // namespace quadkit
