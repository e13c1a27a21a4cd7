#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "quadkit/shapes.hpp"
#include "quadkit/tri2quad.hpp"
#include "support.hpp"

using namespace quadkit;

namespace {

Mesh two_triangles(const std::array<Vec3, 4>& q) {
  // Quad q0 q1 q2 q3 split along q0-q2.
  return Mesh::from_polygons({q.begin(), q.end()}, {{0, 1, 2}, {0, 2, 3}});
}

// Parallelogram strip: bottom row (i, 0), top row (i + 0.5, 1), each cell split along its
// short diagonal. Faces come in strip order A0 B0 A1 B1 ...
Mesh parallelogram_strip(int n) {
  std::vector<Vec3> pos;
  for (int i = 0; i <= n; ++i) pos.emplace_back(i, 0, 0);
  for (int i = 0; i <= n; ++i) pos.emplace_back(i + 0.5, 1, 0);
  auto b = [](int i) { return i; };
  auto t = [n](int i) { return n + 1 + i; };
  std::vector<std::vector<int>> faces;
  for (int i = 0; i < n; ++i) {
    faces.push_back({b(i), b(i + 1), t(i)});
    faces.push_back({b(i + 1), t(i + 1), t(i)});
  }
  return Mesh::from_polygons(pos, faces);
}

int shared_edge(const Mesh& m, int f, int g) {
  for (int h : m.face_halfedges(f)) {
    if (m.face(Mesh::twin(h)) == g) return Mesh::edge(h);
  }
  return -1;
}

TrianglePairing empty_pairing(const Mesh& m) {
  TrianglePairing p;
  p.partner.assign(m.num_faces(), -1);
  p.via.assign(m.num_faces(), -1);
  return p;
}

void pair(const Mesh& m, TrianglePairing& p, int f, int g) {
  p.partner[f] = g;
  p.partner[g] = f;
  p.via[f] = p.via[g] = shared_edge(m, f, g);
}

void check_valid(const Mesh& tri, const QuadDominantMesh& out) {
  CHECK(out.positions == tri.positions());
  std::vector<int> used(tri.num_faces(), 0);
  for (size_t i = 0; i < out.faces.size(); ++i) {
    CHECK(out.faces[i].size() == (out.sources[i].size() == 2 ? 4u : 3u));
    for (int s : out.sources[i]) ++used[s];
  }
  CHECK(std::all_of(used.begin(), used.end(), [](int k) { return k == 1; }));
  CHECK_NOTHROW(Mesh::from_polygons(out.positions, out.faces));
}

}  // namespace

TEST_CASE("rectangularity of simple pairs") {
  const Mesh rect = two_triangles({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 1, 0), Vec3(0, 1, 0)});
  const auto c = merge_candidate(rect, rect.find_edge(0, 2));
  REQUIRE(c);
  CHECK(c->rectangularity == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c->admissible());

  const double s = std::sqrt(3.0) / 2;
  const Mesh para = two_triangles({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1.5, s, 0), Vec3(0.5, s, 0)});
  const auto p = merge_candidate(para, para.find_edge(0, 2));
  CHECK(p->rectangularity == doctest::Approx(120.0));
  CHECK(p->admissible());

  const Mesh crease = Mesh::from_polygons(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2}, {0, 3, 1}});
  const auto k = merge_candidate(crease, crease.find_edge(0, 1));
  CHECK(k->dihedral == doctest::Approx(90.0));
  CHECK_FALSE(k->admissible());

  // Arrow-shaped pair: the projected quad is not convex.
  const Mesh arrow = Mesh::from_polygons(
      {Vec3(0, 0, 0), Vec3(1, 0.2, 0), Vec3(2, 0, 0), Vec3(1, 1, 0)}, {{0, 1, 3}, {1, 2, 3}});
  const auto a = merge_candidate(arrow, arrow.find_edge(1, 3));
  CHECK_FALSE(a->convex);
  CHECK_FALSE(a->admissible());
}

TEST_CASE("misalignment of continuations") {
  std::vector<Vec3> pos{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0),
                        Vec3(1, 2, 0), Vec3(0, 2, 0)};
  CHECK(misalignment(pos, {3, 2, 4, 5}, {0, 1, 2, 3}, 3, 2) == doctest::Approx(0.0));

  // Sheared by 15 degrees: both sides turn by 15.
  const double t = std::tan(radians(15.0));
  pos[4] = Vec3(1 + t, 2, 0);
  pos[5] = Vec3(t, 2, 0);
  CHECK(misalignment(pos, {3, 2, 4, 5}, {0, 1, 2, 3}, 3, 2) == doctest::Approx(30.0));

  // The configuration of the figure: v0..v3 current, q/p/r above.
  std::vector<Vec3> fig{Vec3(-0.01, 0.17, 0), Vec3(0.01, 0.04, 0), Vec3(0.21, 0.04, 0),
                        Vec3(0.20, 0.17, 0),  Vec3(0.16, 0.30, 0), Vec3(0.00, 0.30, 0),
                        Vec3(0.30, 0.30, 0)};
  const int v0 = 0, v1 = 1, v2 = 2, v3 = 3, p = 4, q = 5, r = 6;
  const double pq = misalignment(fig, {v0, v3, p, q}, {v0, v1, v2, v3}, v0, v3);
  const double rp = misalignment(fig, {v0, v3, r, p}, {v0, v1, v2, v3}, v0, v3);
  CHECK(pq < rp);
}

TEST_CASE("consistently triangulated grid becomes a pure quad grid") {
  const Mesh g = grid_patch(7, 5);
  std::vector<std::vector<int>> tris;
  for (int f = 0; f < g.num_faces(); ++f) {
    const auto v = g.face_vertices(f);
    tris.push_back({v[0], v[1], v[2]});
    tris.push_back({v[0], v[2], v[3]});
  }
  const Mesh tri = Mesh::from_polygons(g.positions(), tris);
  const auto merged = merge_triangles(tri);
  CHECK(merged.num_quads() == 35);
  CHECK(merged.num_triangles() == 0);
  check_valid(tri, merged);
}

TEST_CASE("triangulated cube and single triangle") {
  const Mesh cube_tri = triangulate_quads(cube(1), 3);
  REQUIRE(cube_tri.num_faces() == 12);
  const auto m = merge_triangles(cube_tri);
  CHECK(m.num_quads() == 6);
  CHECK(m.num_triangles() == 0);

  const Mesh one = Mesh::from_polygons({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
  Tri2QuadStats st;
  const auto r = tri_to_quad(one, &st);
  CHECK(r.num_triangles() == 1);
  CHECK(r.num_quads() == 0);
  CHECK(st.remaining_triangles == 1);
  CHECK(st.purity == 0.0);
}

TEST_CASE("loop shifting absorbs dangling triangles of a parallelogram strip") {
  const int n = 6;
  const Mesh strip = parallelogram_strip(n);
  TrianglePairing p = empty_pairing(strip);
  // Shifted by one: B_i with A_{i+1}, leaving A_0 and B_{n-1}.
  for (int i = 0; i + 1 < n; ++i) pair(strip, p, 2 * i + 1, 2 * i + 2);
  const auto before = build_quad_dominant(strip, p);
  CHECK(before.num_quads() == n - 1);
  CHECK(before.num_triangles() == 2);
  int shifts = 0;
  const auto after = loop_shift(strip, before, &shifts);
  CHECK(after.num_quads() == n);
  CHECK(after.num_triangles() == 0);
  CHECK(shifts == 1);
  check_valid(strip, after);
}

TEST_CASE("loop shifting leaves pure results and worse shifts alone") {
  const Mesh g = triangulate_quads(grid_patch(4, 4), 2);
  const auto merged = merge_triangles(g);
  REQUIRE(merged.num_triangles() == 0);
  int shifts = -1;
  const auto same = loop_shift(g, merged, &shifts);
  CHECK(shifts == 0);
  CHECK(same.faces == merged.faces);

  // Three triangles: the rectangle pair is kept, the leftover cannot improve on it.
  const Mesh three = Mesh::from_polygons(
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(-0.6, 0.3, 0)},
      {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}});
  const auto m3 = merge_triangles(three);
  REQUIRE(m3.num_quads() == 1);
  const auto s3 = loop_shift(three, m3, &shifts);
  CHECK(shifts == 0);
  CHECK(s3.faces == m3.faces);
}

TEST_CASE("randomly triangulated corpus meshes recover their quads") {
  int runs = 0, recovered = 0;
  for (const auto& [name, mesh] : desk_corpus()) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      CAPTURE(name);
      CAPTURE(seed);
      const Mesh tri = triangulate_quads(mesh, seed);
      const auto merged = merge_triangles(tri);
      int shifts = 0;
      const auto out = loop_shift(tri, merged, &shifts);
      CHECK(out.num_quads() >= merged.num_quads());
      check_valid(tri, out);
      ++runs;
      if (out.num_triangles() == 0 && out.num_quads() == mesh.num_faces()) ++recovered;
    }
  }
  MESSAGE("recovered " << recovered << " of " << runs);
  CHECK(recovered >= 0.95 * runs);
}

TEST_CASE("tri2quad is deterministic") {
  const Mesh tri = triangulate_quads(torus(12, 8), 4);
  const auto a = tri_to_quad(tri);
  const auto b = tri_to_quad(tri);
  CHECK(a.faces == b.faces);
  CHECK(a.sources == b.sources);
}
