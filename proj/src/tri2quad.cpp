#include "quadkit/tri2quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "quadkit/features.hpp"

namespace quadkit {
namespace {

constexpr double kConvexEps = 1e-10;
constexpr double kScoreEps = 1e-9;

int other_vertex(const std::array<int, 4>& quad, int v, int not_this) {
  for (int i = 0; i < 4; ++i) {
    if (quad[i] != v) continue;
    const int prev = quad[(i + 3) % 4];
    const int next = quad[(i + 1) % 4];
    return prev == not_this ? next : prev;
  }
  return -1;
}

std::vector<std::optional<MergeCandidate>> all_candidates(const Mesh& mesh) {
  std::vector<std::optional<MergeCandidate>> out(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) out[e] = merge_candidate(mesh, e);
  return out;
}

bool usable(const std::vector<std::optional<MergeCandidate>>& c, int e) {
  return c[e] && c[e]->admissible();
}

// The two faces on either side of edge e.
std::pair<int, int> edge_faces(const Mesh& mesh, int e) {
  return {mesh.face(2 * e), mesh.face(2 * e + 1)};
}

void pair_up(TrianglePairing& p, const Mesh& mesh, int e) {
  const auto [f, g] = edge_faces(mesh, e);
  p.partner[f] = g;
  p.partner[g] = f;
  p.via[f] = p.via[g] = e;
}

void unpair(TrianglePairing& p, int f) {
  const int g = p.partner[f];
  p.partner[f] = -1;
  p.via[f] = -1;
  if (g >= 0) {
    p.partner[g] = -1;
    p.via[g] = -1;
  }
}

}  // namespace

QuadShape quad_shape(const std::array<Vec3, 4>& quad, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  std::array<Vec3, 4> p;
  for (int i = 0; i < 4; ++i) p[i] = quad[i] - quad[i].dot(n) * n;
  QuadShape s;
  s.convex = true;
  for (int i = 0; i < 4; ++i) {
    const Vec3 in = p[i] - p[(i + 3) % 4];
    const Vec3 out = p[(i + 1) % 4] - p[i];
    if (in.norm() == 0 || out.norm() == 0) {
      s.convex = false;
      s.rectangularity += 90;
      continue;
    }
    if (in.normalized().cross(out.normalized()).dot(n) <= kConvexEps) s.convex = false;
    s.rectangularity += std::abs(degrees(angle_between(-in, out)) - 90.0);
  }
  return s;
}

std::optional<MergeCandidate> merge_candidate(const Mesh& mesh, int e) {
  const int h = 2 * e;
  const int g = h + 1;
  const int f1 = mesh.face(h), f2 = mesh.face(g);
  if (f1 < 0 || f2 < 0 || f1 == f2) return std::nullopt;
  if (mesh.face_degree(f1) != 3 || mesh.face_degree(f2) != 3) return std::nullopt;
  const int a = mesh.tail(h), b = mesh.head(h);
  const int c = mesh.head(mesh.next(h));
  const int d = mesh.head(mesh.next(g));
  if (c == d) return std::nullopt;
  MergeCandidate m;
  m.edge = e;
  m.quad = {a, d, b, c};
  m.dihedral = dihedral_angle(mesh, e);
  const Vec3 n = mesh.face_normal(f1) + mesh.face_normal(f2);
  if (n.norm() == 0) return m;
  const auto shape = quad_shape({mesh.position(a), mesh.position(d), mesh.position(b),
                                 mesh.position(c)},
                                n);
  m.rectangularity = shape.rectangularity;
  m.convex = shape.convex;
  return m;
}

double misalignment(const std::vector<Vec3>& positions, const std::array<int, 4>& candidate,
                    const std::array<int, 4>& current, int a, int b) {
  double sum = 0;
  for (auto [u, w] : {std::pair{a, b}, std::pair{b, a}}) {
    const int into = other_vertex(current, u, w);
    const int out = other_vertex(candidate, u, w);
    sum += degrees(angle_between(positions[u] - positions[into], positions[out] - positions[u]));
  }
  return sum;
}

int QuadDominantMesh::num_quads() const {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(),
                                        [](const auto& f) { return f.size() == 4; }));
}

int QuadDominantMesh::num_triangles() const {
  return static_cast<int>(std::count_if(faces.begin(), faces.end(),
                                        [](const auto& f) { return f.size() == 3; }));
}

TrianglePairing merge_pairing(const Mesh& mesh) {
  const auto cands = all_candidates(mesh);
  TrianglePairing pairing;
  pairing.partner.assign(mesh.num_faces(), -1);
  pairing.via.assign(mesh.num_faces(), -1);
  auto free_triangle = [&](int f) {
    return f >= 0 && mesh.face_degree(f) == 3 && pairing.partner[f] < 0;
  };

  std::vector<int> order;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (usable(cands, e)) order.push_back(e);
  }
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return cands[x]->rectangularity < cands[y]->rectangularity;
  });

  using Entry = std::tuple<double, double, int>;  // misalignment, rectangularity, edge
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  auto enqueue_around = [&](int e) {
    const auto& cur = cands[e]->quad;
    const auto [f1, f2] = edge_faces(mesh, e);
    for (int f : {f1, f2}) {
      for (int h : mesh.face_halfedges(f)) {
        const int side = Mesh::edge(h);
        if (side == e) continue;
        const int t = mesh.face(Mesh::twin(h));
        if (!free_triangle(t)) continue;
        for (int th : mesh.face_halfedges(t)) {
          const int e2 = Mesh::edge(th);
          if (e2 == side || !usable(cands, e2)) continue;
          const int other = mesh.face(Mesh::twin(th));
          if (!free_triangle(other)) continue;
          const double mis = misalignment(mesh.positions(), cands[e2]->quad, cur, mesh.tail(h),
                                          mesh.head(h));
          queue.emplace(mis, cands[e2]->rectangularity, e2);
        }
      }
    }
  };

  for (int seed : order) {
    const auto [f, g] = edge_faces(mesh, seed);
    if (!free_triangle(f) || !free_triangle(g)) continue;
    pair_up(pairing, mesh, seed);
    enqueue_around(seed);
    while (!queue.empty()) {
      const int e = std::get<2>(queue.top());
      queue.pop();
      const auto [x, y] = edge_faces(mesh, e);
      if (!free_triangle(x) || !free_triangle(y)) continue;
      pair_up(pairing, mesh, e);
      enqueue_around(e);
    }
  }
  return pairing;
}

int loop_shift_pairing(const Mesh& mesh, TrianglePairing& pairing) {
  const auto cands = all_candidates(mesh);
  const int F = mesh.num_faces();
  auto is_triangle = [&](int f) { return f >= 0 && mesh.face_degree(f) == 3; };
  int shifts = 0;

  // Alternating path from free triangle `start` to another free triangle; re-pairing along
  // it adds one quad.
  auto augment = [&](int start) {
    std::vector<int> parent(F, -2), parent_edge(F, -1);
    std::vector<int> frontier{start};
    parent[start] = -1;
    for (size_t head = 0; head < frontier.size(); ++head) {
      const int x = frontier[head];
      for (int h : mesh.face_halfedges(x)) {
        const int e = Mesh::edge(h);
        if (!usable(cands, e) || e == pairing.via[x]) continue;
        const int y = mesh.face(Mesh::twin(h));
        if (!is_triangle(y) || parent[y] != -2) continue;
        if (pairing.partner[y] < 0) {
          // Walk back: pair (x, y), then each earlier even triangle with its predecessor.
          std::vector<int> repairs{e};
          for (int cur = x; cur != start;) {
            const int odd = parent[cur];
            repairs.push_back(parent_edge[odd]);
            cur = parent[odd];
          }
          for (int via : repairs) {
            const auto [p, q] = edge_faces(mesh, via);
            unpair(pairing, p);
            unpair(pairing, q);
          }
          for (int via : repairs) pair_up(pairing, mesh, via);
          return true;
        }
        const int z = pairing.partner[y];
        if (parent[z] != -2) continue;
        parent[y] = x;
        parent_edge[y] = e;
        parent[z] = y;
        frontier.push_back(z);
      }
    }
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < F; ++t) {
      if (is_triangle(t) && pairing.partner[t] < 0 && augment(t)) {
        ++shifts;
        changed = true;
      }
    }
    if (changed) continue;
    // Same quad count, better shape: move a leftover triangle one step along its loop.
    for (int t = 0; t < F && !changed; ++t) {
      if (!is_triangle(t) || pairing.partner[t] >= 0) continue;
      for (int h : mesh.face_halfedges(t)) {
        const int e = Mesh::edge(h);
        const int y = mesh.face(Mesh::twin(h));
        if (!usable(cands, e) || !is_triangle(y) || pairing.partner[y] < 0) continue;
        if (cands[e]->rectangularity < cands[pairing.via[y]]->rectangularity - kScoreEps) {
          unpair(pairing, y);
          pair_up(pairing, mesh, e);
          ++shifts;
          changed = true;
          break;
        }
      }
    }
  }
  return shifts;
}

QuadDominantMesh build_quad_dominant(const Mesh& mesh, const TrianglePairing& pairing) {
  QuadDominantMesh out;
  out.positions = mesh.positions();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const int g = pairing.partner[f];
    if (g < 0) {
      out.faces.push_back(mesh.face_vertices(f));
      out.sources.push_back({f});
    } else if (f < g) {
      const auto c = merge_candidate(mesh, pairing.via[f]);
      out.faces.push_back({c->quad.begin(), c->quad.end()});
      out.sources.push_back({f, g});
    }
  }
  return out;
}

QuadDominantMesh merge_triangles(const Mesh& mesh) {
  return build_quad_dominant(mesh, merge_pairing(mesh));
}

QuadDominantMesh loop_shift(const Mesh& mesh, const QuadDominantMesh& merged, int* shifts) {
  TrianglePairing pairing;
  pairing.partner.assign(mesh.num_faces(), -1);
  pairing.via.assign(mesh.num_faces(), -1);
  for (const auto& src : merged.sources) {
    if (src.size() != 2) continue;
    pairing.partner[src[0]] = src[1];
    pairing.partner[src[1]] = src[0];
    for (int h : mesh.face_halfedges(src[0])) {
      if (mesh.face(Mesh::twin(h)) == src[1]) pairing.via[src[0]] = pairing.via[src[1]] = Mesh::edge(h);
    }
  }
  const int n = loop_shift_pairing(mesh, pairing);
  if (shifts) *shifts = n;
  return build_quad_dominant(mesh, pairing);
}

QuadDominantMesh tri_to_quad(const Mesh& mesh, Tri2QuadStats* stats) {
  TrianglePairing pairing = merge_pairing(mesh);
  const int shifts = loop_shift_pairing(mesh, pairing);
  QuadDominantMesh out = build_quad_dominant(mesh, pairing);
  if (stats) {
    stats->input_triangles = 0;
    for (int f = 0; f < mesh.num_faces(); ++f) stats->input_triangles += mesh.face_degree(f) == 3;
    stats->quads = out.num_quads();
    stats->remaining_triangles = out.num_triangles();
    stats->purity = stats->input_triangles > 0
                        ? 100.0 * (stats->input_triangles - stats->remaining_triangles) /
                              stats->input_triangles
                        : 100.0;
    stats->loop_shifts = shifts;
  }
  return out;
}

}  // namespace quadkit
