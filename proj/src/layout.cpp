#include "quadkit/layout.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

#include "quadkit/features.hpp"

namespace quadkit {
namespace {

std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::vector<bool> feature_flags(const Mesh& mesh) {
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.is_feature_edge(e)) return mesh.feature_edges();
  }
  return detect_sharp_edges(mesh);
}

// Next boundary half-edge of cluster c after h, turning around head(h).
int next_on_border(const Mesh& mesh, const std::vector<int>& label, int h) {
  int g = mesh.next(h);
  for (;;) {
    const int t = mesh.face(Mesh::twin(g));
    if (t < 0 || label[t] != label[mesh.face(h)]) return g;
    g = mesh.next(Mesh::twin(g));
  }
}

bool on_border(const Mesh& mesh, const std::vector<int>& label, int h) {
  const int f = mesh.face(h);
  if (f < 0) return false;
  const int t = mesh.face(Mesh::twin(h));
  return t < 0 || label[t] != label[f];
}

struct ClusterShape {
  std::vector<std::vector<int>> loops;  // half-edge cycles
  int euler = 0;
};

std::vector<ClusterShape> cluster_shapes(const Mesh& mesh, const std::vector<int>& label, int count) {
  std::vector<ClusterShape> out(count);
  std::vector<std::set<int>> verts(count);
  std::vector<int> edges(count, 0), faces(count, 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    ++faces[label[f]];
    for (int v : mesh.face_vertices(f)) verts[label[f]].insert(v);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int f = mesh.face(2 * e), g = mesh.face(2 * e + 1);
    if (f >= 0) ++edges[label[f]];
    if (g >= 0 && (f < 0 || label[g] != label[f])) ++edges[label[g]];
  }
  std::vector<char> seen(mesh.num_halfedges(), 0);
  for (int h = 0; h < mesh.num_halfedges(); ++h) {
    if (seen[h] || !on_border(mesh, label, h)) continue;
    std::vector<int> loop;
    for (int g = h; !seen[g]; g = next_on_border(mesh, label, g)) {
      seen[g] = 1;
      loop.push_back(g);
    }
    out[label[mesh.face(h)]].loops.push_back(std::move(loop));
  }
  for (int c = 0; c < count; ++c) {
    out[c].euler = static_cast<int>(verts[c].size()) - edges[c] + faces[c];
  }
  return out;
}

// Splits cluster c into two halves grown from its seed and the face farthest from it.
void split_cluster(const Mesh& mesh, std::vector<int>& label, int c, int seed, int fresh) {
  auto bfs = [&](std::vector<int> sources) {
    std::vector<int> owner(mesh.num_faces(), -1);
    std::deque<int> queue;
    for (size_t i = 0; i < sources.size(); ++i) {
      owner[sources[i]] = static_cast<int>(i);
      queue.push_back(sources[i]);
    }
    int last = sources.front();
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      last = f;
      for (int g : mesh.face_neighbors(f)) {
        if (label[g] != c || owner[g] >= 0) continue;
        owner[g] = owner[f];
        queue.push_back(g);
      }
    }
    return std::pair{owner, last};
  };
  if (label[seed] != c) {
    seed = static_cast<int>(std::find(label.begin(), label.end(), c) - label.begin());
  }
  const int far = bfs({seed}).second;
  if (far == seed) return;
  const auto owner = bfs({seed, far}).first;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (label[f] == c && owner[f] == 1) label[f] = fresh;
  }
}

double surface_angle(const Mesh& mesh, int v) {
  double sum = 0;
  for (int h : mesh.outgoing(v)) {
    if (mesh.face(h) < 0) continue;
    const int p = mesh.tail(mesh.prev(h));
    sum += angle_between(mesh.position(mesh.head(h)) - mesh.position(v),
                         mesh.position(p) - mesh.position(v));
  }
  return degrees(sum);
}

// Per cluster, the face farthest (in face rings) from the cluster's boundary.
std::vector<int> innermost_faces(const Mesh& mesh, const std::vector<int>& label, int count) {
  std::vector<int> ring(mesh.num_faces(), -1);
  std::deque<int> queue;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int h : mesh.face_halfedges(f)) {
      const int g = mesh.face(Mesh::twin(h));
      if (g < 0 || label[g] != label[f]) {
        ring[f] = 0;
        queue.push_back(f);
        break;
      }
    }
  }
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int g : mesh.face_neighbors(f)) {
      if (label[g] == label[f] && ring[g] < 0) {
        ring[g] = ring[f] + 1;
        queue.push_back(g);
      }
    }
  }
  std::vector<int> best(count, -1);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    int& b = best[label[f]];
    if (b < 0 || ring[f] > ring[b]) b = f;
  }
  return best;
}

// Drops corners no face uses, keeping the order of the rest.
void drop_unused_corners(LayoutMesh& layout) {
  const int n = static_cast<int>(layout.positions.size());
  std::vector<int> remap(n, -1);
  for (const auto& face : layout.faces) {
    for (int v : face) remap[v] = 0;
  }
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (remap[v] < 0) continue;
    remap[v] = next;
    layout.positions[next] = layout.positions[v];
    layout.source_vertex[next] = layout.source_vertex[v];
    layout.feature_vertex[next] = layout.feature_vertex[v];
    ++next;
  }
  if (next == n) return;
  layout.positions.resize(next);
  layout.source_vertex.resize(next);
  layout.feature_vertex.resize(next);
  for (auto& face : layout.faces) {
    for (int& v : face) v = remap[v];
  }
  std::map<std::pair<int, int>, std::vector<Vec3>> sides;
  for (auto& [key, poly] : layout.sides) {
    if (remap[key.first] >= 0 && remap[key.second] >= 0) sides[{remap[key.first], remap[key.second]}] = std::move(poly);
  }
  layout.sides = std::move(sides);
  std::vector<std::pair<int, int>> features;
  for (auto [a, b] : layout.feature_edges) {
    if (remap[a] >= 0 && remap[b] >= 0) features.emplace_back(remap[a], remap[b]);
  }
  layout.feature_edges = std::move(features);
}

}  // namespace

int LayoutMesh::num_quads() const {
  return static_cast<int>(
      std::count_if(faces.begin(), faces.end(), [](const auto& f) { return f.size() == 4; }));
}

bool LayoutMesh::is_feature_edge(int a, int b) const {
  return std::binary_search(feature_edges.begin(), feature_edges.end(), ordered(a, b));
}

Mesh LayoutMesh::to_mesh() const {
  BuildOptions opts;
  opts.degenerate_area = -1;
  Mesh m = Mesh::from_polygons(positions, faces, opts);
  std::vector<bool> flags(m.num_edges(), false);
  for (auto [a, b] : feature_edges) {
    const int e = m.find_edge(a, b);
    if (e >= 0) flags[e] = true;
  }
  m.set_feature_edges(flags);
  return m;
}

LayoutMesh extract_layout(const Mesh& mesh, const ClusterPartition& partition,
                          const ExtractOptions& options, ExtractReport* report) {
  ExtractReport local;
  ExtractReport& rep = report ? *report : local;
  rep = {};
  std::vector<int> label = partition.face_cluster;
  if (static_cast<int>(label.size()) != mesh.num_faces() ||
      std::any_of(label.begin(), label.end(), [](int c) { return c < 0; })) {
    throw InputError("extract_layout: partition must assign every face");
  }
  int count = partition.num_clusters();
  std::vector<int> seeds = partition.seed_face;

  std::vector<ClusterShape> shapes;
  for (int attempt = 0;; ++attempt) {
    shapes = cluster_shapes(mesh, label, count);
    std::vector<int> bad;
    for (int c = 0; c < count; ++c) {
      if (shapes[c].loops.size() != 1 || shapes[c].euler != 1) bad.push_back(c);
    }
    if (bad.empty()) break;
    if (attempt == options.max_splits) {
      throw LayoutError("extract_layout: cluster " + std::to_string(bad.front()) +
                        " is not a disk after splitting");
    }
    for (int c : bad) {
      rep.warnings.push_back("cluster " + std::to_string(c) + " is not a disk (" +
                             std::to_string(shapes[c].loops.size()) + " boundary loops, euler " +
                             std::to_string(shapes[c].euler) + "); split in two");
      split_cluster(mesh, label, c, seeds[c], count);
      // The new half starts from its lowest face.
      seeds.push_back(static_cast<int>(std::find(label.begin(), label.end(), count) - label.begin()));
      ++count;
      ++rep.split_clusters;
    }
  }

  const auto sharp = feature_flags(mesh);
  auto is_corner = [&](int v) {
    std::set<int> regions;
    for (int f : mesh.vertex_faces(v)) regions.insert(label[f]);
    const bool boundary = mesh.is_boundary_vertex(v);
    if (regions.size() + (boundary ? 1 : 0) >= 3) return true;
    if (boundary && std::abs(surface_angle(mesh, v) - 180.0) > options.boundary_corner) return true;
    if (regions.size() >= 2) {
      int degree = 0;
      for (int h : mesh.outgoing(v)) degree += sharp[Mesh::edge(h)] ? 1 : 0;
      if (degree == 1 || degree >= 3) return true;
    }
    return false;
  };

  LayoutMesh layout;
  std::map<int, int> corner_of;
  std::map<std::pair<int, int>, int> side_key;
  std::set<std::pair<int, int>> feature_sides;
  auto corner_id = [&](int v) {
    auto [it, fresh] = corner_of.emplace(v, static_cast<int>(layout.positions.size()));
    if (fresh) {
      layout.positions.push_back(mesh.position(v));
      layout.source_vertex.push_back(v);
    }
    return it->second;
  };

  for (int c = 0; c < count; ++c) {
    const auto& loop = shapes[c].loops.front();
    std::vector<int> at;  // positions in the loop that start at a corner
    for (size_t i = 0; i < loop.size(); ++i) {
      if (is_corner(mesh.tail(loop[i]))) at.push_back(static_cast<int>(i));
    }
    if (at.size() < 3) {
      throw LayoutError("extract_layout: cluster " + std::to_string(c) + " has " +
                        std::to_string(at.size()) + " corners");
    }
    std::vector<int> face;
    const int n = static_cast<int>(loop.size());
    for (size_t k = 0; k < at.size(); ++k) {
      const int begin = at[k], end = at[(k + 1) % at.size()];
      const int a = corner_id(mesh.tail(loop[begin]));
      const int b = corner_id(mesh.tail(loop[end]));
      std::vector<Vec3> poly{mesh.position(mesh.tail(loop[begin]))};
      int min_edge = mesh.num_edges();
      bool all_sharp = true;
      for (int i = begin;; i = (i + 1) % n) {
        poly.push_back(mesh.position(mesh.head(loop[i])));
        min_edge = std::min(min_edge, Mesh::edge(loop[i]));
        all_sharp = all_sharp && sharp[Mesh::edge(loop[i])];
        if ((i + 1) % n == end) break;
      }
      if (a == b) {
        throw LayoutError("extract_layout: a side of cluster " + std::to_string(c) +
                          " starts and ends at the same corner");
      }
      const auto pair = ordered(a, b);
      auto [it, fresh] = side_key.emplace(pair, min_edge);
      if (!fresh && it->second != min_edge) {
        throw LayoutError("extract_layout: two sides join corners " + std::to_string(a) + " and " +
                          std::to_string(b));
      }
      if (a > b) std::reverse(poly.begin(), poly.end());
      layout.sides[pair] = std::move(poly);
      if (all_sharp) feature_sides.insert(pair);
      face.push_back(a);
    }
    std::vector<int> sorted = face;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw LayoutError("extract_layout: cluster " + std::to_string(c) + " repeats a corner");
    }
    layout.faces.push_back(std::move(face));
    layout.face_cluster.push_back(c);
  }

  for (int f : innermost_faces(mesh, label, count)) layout.face_point.push_back(mesh.face_center(f));

  std::set<std::vector<int>> corner_sets;
  for (const auto& face : layout.faces) {
    std::vector<int> sorted = face;
    std::sort(sorted.begin(), sorted.end());
    if (!corner_sets.insert(sorted).second) {
      throw LayoutError("extract_layout: two faces share all their corners");
    }
  }

  layout.feature_edges.assign(feature_sides.begin(), feature_sides.end());
  layout.feature_vertex.assign(layout.positions.size(), 0);
  for (auto [a, b] : layout.feature_edges) layout.feature_vertex[a] = layout.feature_vertex[b] = 1;
  drop_unused_corners(layout);
  rep.corners = static_cast<int>(layout.positions.size());
  try {
    layout.to_mesh();
  } catch (const NonManifoldError& e) {
    throw LayoutError(std::string("extract_layout: layout is not manifold: ") + e.what());
  }
  return layout;
}

int collapse_to_quads(LayoutMesh& layout) {
  int collapses = 0;
  for (;;) {
    // Feature loops: connected components of feature sides.
    const int n = static_cast<int>(layout.positions.size());
    std::vector<int> loop(n);
    std::iota(loop.begin(), loop.end(), 0);
    std::function<int(int)> find = [&](int x) { return loop[x] == x ? x : loop[x] = find(loop[x]); };
    for (auto [a, b] : layout.feature_edges) loop[find(a)] = find(b);

    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < layout.num_faces(); ++f) {
      const auto& face = layout.faces[f];
      for (size_t i = 0; i < face.size(); ++i) {
        edge_faces[ordered(face[i], face[(i + 1) % face.size()])].push_back(f);
      }
    }
    std::vector<std::tuple<double, int, int>> candidates;
    for (const auto& [e, fs] : edge_faces) {
      if (fs.size() != 2) continue;
      if (layout.faces[fs[0]].size() == 4 || layout.faces[fs[1]].size() == 4) continue;
      if (layout.faces[fs[0]].size() < 4 || layout.faces[fs[1]].size() < 4) continue;
      candidates.emplace_back((layout.positions[e.first] - layout.positions[e.second]).norm(), e.first,
                              e.second);
    }
    std::sort(candidates.begin(), candidates.end());

    bool done = false;
    for (auto [len, a, b] : candidates) {
      const bool fa = layout.feature_vertex[a], fb = layout.feature_vertex[b];
      if (fa && fb && find(a) != find(b)) continue;
      LayoutMesh next = layout;
      const Vec3 p = fa ? layout.positions[a]
                        : (fb ? layout.positions[b] : Vec3(0.5 * (layout.positions[a] + layout.positions[b])));
      next.positions[a] = p;
      next.feature_vertex[a] = fa || fb;
      next.source_vertex[a] = fa ? layout.source_vertex[a] : (fb ? layout.source_vertex[b] : -1);
      bool ok = true;
      for (auto& face : next.faces) {
        for (int& v : face) {
          if (v == b) v = a;
        }
        face.erase(std::unique(face.begin(), face.end()), face.end());
        if (face.size() > 1 && face.front() == face.back()) face.pop_back();
        std::vector<int> sorted = face;
        std::sort(sorted.begin(), sorted.end());
        if (face.size() < 3 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ok = false;
      }
      if (!ok) continue;
      std::set<std::pair<int, int>> features;
      for (auto [x, y] : layout.feature_edges) {
        if (x == b) x = a;
        if (y == b) y = a;
        if (x != y) features.insert(ordered(x, y));
      }
      next.feature_edges.assign(features.begin(), features.end());
      next.sides.clear();
      for (auto [key, poly] : layout.sides) {
        auto [x, y] = key;
        if (ordered(x, y) == ordered(a, b)) continue;
        if (x == b) x = a;
        if (y == b) y = a;
        if (x == a) poly.front() = p;
        if (y == a) poly.back() = p;
        if (x > y) {
          std::reverse(poly.begin(), poly.end());
          std::swap(x, y);
        }
        next.sides[{x, y}] = std::move(poly);
      }
      try {
        next.to_mesh();
      } catch (const NonManifoldError&) {
        continue;
      }
      layout = std::move(next);
      ++collapses;
      done = true;
      break;
    }
    if (!done) {
      drop_unused_corners(layout);
      return collapses;
    }
  }
}

}  // namespace quadkit
