#include "quadkit/base_complex.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <set>

#include "quadkit/features.hpp"

namespace quadkit {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool crosses(const Mesh& mesh, int h, const std::vector<char>& in_region,
             const std::vector<char>& cut) {
  const int g = mesh.face(Mesh::twin(h));
  return g >= 0 && in_region[g] && !cut[Mesh::edge(h)];
}

// Next boundary half-edge of the cut-open region after boundary half-edge h, plus the
// number of region faces in the fan at head(h).
std::pair<int, int> next_boundary(const Mesh& mesh, int h, const std::vector<char>& in_region,
                                  const std::vector<char>& cut) {
  int g = mesh.next(h);
  int fan = 1;
  while (crosses(mesh, g, in_region, cut)) {
    g = mesh.next(Mesh::twin(g));
    ++fan;
  }
  return {g, fan};
}

int total_defect(const Mesh& mesh, const std::vector<int>& faces, const std::vector<char>& cut,
                 std::vector<char>& in_region) {
  // Split into components first; topology is evaluated per component.
  std::vector<int> comp_of(faces.size(), -1);
  std::vector<int> local(mesh.num_faces(), -1);
  for (size_t i = 0; i < faces.size(); ++i) local[faces[i]] = static_cast<int>(i);
  int defect = 0;
  for (size_t s = 0; s < faces.size(); ++s) {
    if (comp_of[s] >= 0) continue;
    std::vector<int> comp{faces[s]};
    comp_of[s] = static_cast<int>(s);
    for (size_t k = 0; k < comp.size(); ++k) {
      for (int h : mesh.face_halfedges(comp[k])) {
        if (!crosses(mesh, h, in_region, cut)) continue;
        const int g = mesh.face(Mesh::twin(h));
        if (comp_of[local[g]] < 0) {
          comp_of[local[g]] = static_cast<int>(s);
          comp.push_back(g);
        }
      }
    }
    for (int f : faces) in_region[f] = 0;
    for (int f : comp) in_region[f] = 1;
    defect += region_topology(mesh, comp, cut).defect();
    for (int f : comp) in_region[f] = 0;
    for (int f : faces) in_region[f] = 1;
  }
  return defect;
}

std::optional<Chart> grid_layout(const Mesh& mesh, const std::vector<int>& faces,
                                 const std::vector<char>& cut, std::vector<char>& in_region) {
  for (int f : faces) in_region[f] = 1;
  int start = -1;
  for (int f : faces) {
    for (int h : mesh.face_halfedges(f)) {
      const bool boundary = !crosses(mesh, h, in_region, cut);
      const bool prev_boundary = !crosses(mesh, mesh.prev(h), in_region, cut);
      if (boundary && prev_boundary && (start < 0 || h < start)) start = h;
    }
  }
  std::optional<Chart> result;
  if (start >= 0) {
    std::vector<std::array<int, 3>> cells;  // i, j, bottom half-edge
    std::vector<int> bottom_of(mesh.num_faces(), -1);
    std::vector<std::pair<int, int>> pos(mesh.num_faces());
    std::queue<int> queue;
    bottom_of[mesh.face(start)] = start;
    pos[mesh.face(start)] = {0, 0};
    queue.push(mesh.face(start));
    bool consistent = true;
    int max_i = 0, max_j = 0, min_i = 0, min_j = 0;
    while (!queue.empty() && consistent) {
      const int f = queue.front();
      queue.pop();
      const int b = bottom_of[f];
      const auto [i, j] = pos[f];
      cells.push_back({i, j, b});
      max_i = std::max(max_i, i);
      max_j = std::max(max_j, j);
      min_i = std::min(min_i, i);
      min_j = std::min(min_j, j);
      const int right = mesh.next(b);
      const int top = mesh.next(right);
      const int left = mesh.prev(b);
      const std::array<std::tuple<int, int, int, int>, 4> moves{{
          {right, i + 1, j, mesh.next(Mesh::twin(right))},
          {top, i, j + 1, Mesh::twin(top)},
          {left, i - 1, j, mesh.prev(Mesh::twin(left))},
          {b, i, j - 1, mesh.next(mesh.next(Mesh::twin(b)))},
      }};
      for (const auto& [side, ni, nj, nb] : moves) {
        if (!crosses(mesh, side, in_region, cut)) continue;
        const int g = mesh.face(nb);
        if (bottom_of[g] < 0) {
          bottom_of[g] = nb;
          pos[g] = {ni, nj};
          queue.push(g);
        } else if (bottom_of[g] != nb || pos[g] != std::pair<int, int>{ni, nj}) {
          consistent = false;
        }
      }
    }
    const int m = max_i + 1;
    const int n = max_j + 1;
    if (consistent && min_i == 0 && min_j == 0 &&
        static_cast<size_t>(m) * n == faces.size() && cells.size() == faces.size()) {
      Chart c;
      c.m = m;
      c.n = n;
      c.cell_face.assign(m * n, -1);
      c.cell_bottom.assign(m * n, -1);
      c.grid.assign((m + 1) * (n + 1), -1);
      for (const auto& [i, j, b] : cells) {
        c.cell_face[j * m + i] = mesh.face(b);
        c.cell_bottom[j * m + i] = b;
        c.grid[j * (m + 1) + i] = mesh.tail(b);
        c.grid[j * (m + 1) + i + 1] = mesh.head(b);
        c.grid[(j + 1) * (m + 1) + i + 1] = mesh.head(mesh.next(b));
        c.grid[(j + 1) * (m + 1) + i] = mesh.head(mesh.next(mesh.next(b)));
      }
      if (std::find(c.cell_face.begin(), c.cell_face.end(), -1) == c.cell_face.end()) {
        c.faces = faces;
        std::sort(c.faces.begin(), c.faces.end());
        c.corners = {c.node(0, 0), c.node(m, 0), c.node(m, n), c.node(0, n)};
        for (int i = 0; i <= m; ++i) c.sides[0].push_back(c.node(i, 0));
        for (int j = 0; j <= n; ++j) c.sides[1].push_back(c.node(m, j));
        for (int i = m; i >= 0; --i) c.sides[2].push_back(c.node(i, n));
        for (int j = n; j >= 0; --j) c.sides[3].push_back(c.node(0, j));
        result = std::move(c);
      }
    }
  }
  for (int f : faces) in_region[f] = 0;
  return result;
}

struct Candidate {
  std::vector<int> edges;
  double length = 0.0;
  int min_edge = 0;
};

// Maximal straight segment through an interior edge of the region, stopping at vertices
// that already touch a cut.
std::vector<int> interior_segment(const Mesh& mesh, int e, const std::vector<char>& touched) {
  const int h0 = Mesh::halfedge(e, 0);
  auto walk = [&](int start, bool& closed) {
    std::vector<int> out{start};
    closed = false;
    int h = start;
    while (!touched[mesh.head(h)] && static_cast<int>(out.size()) <= mesh.num_halfedges()) {
      const int n = straight_continuation(mesh, h);
      if (n < 0) break;
      if (n == start) {
        closed = true;
        break;
      }
      out.push_back(n);
      h = n;
    }
    return out;
  };
  bool closed = false;
  auto forward = walk(h0, closed);
  std::vector<int> edges;
  if (!closed) {
    bool unused = false;
    auto backward = walk(Mesh::twin(h0), unused);
    for (size_t i = backward.size(); i-- > 1;) edges.push_back(Mesh::edge(backward[i]));
  }
  for (int h : forward) edges.push_back(Mesh::edge(h));
  return edges;
}

}  // namespace

int RegionTopology::defect() const {
  int d = 2 * genus + std::abs(boundary_loops - 1) + concave_excess;
  if (genus == 0 && boundary_loops == 1 && concave_excess == 0) d += std::abs(convex_corners - 4);
  return d;
}

RegionTopology region_topology(const Mesh& mesh, const std::vector<int>& faces,
                               const std::vector<char>& cut) {
  std::vector<char> in_region(mesh.num_faces(), 0);
  for (int f : faces) in_region[f] = 1;
  UnionFind uf(mesh.num_halfedges());
  int interior_edges = 0;
  std::vector<int> boundary;
  for (int f : faces) {
    for (int h : mesh.face_halfedges(f)) {
      if (crosses(mesh, h, in_region, cut)) {
        const int t = Mesh::twin(h);
        uf.unite(h, mesh.next(t));
        if (h < t) ++interior_edges;
      } else {
        boundary.push_back(h);
      }
    }
  }
  std::set<int> classes;
  for (int f : faces) {
    for (int h : mesh.face_halfedges(f)) classes.insert(uf.find(h));
  }
  RegionTopology topo;
  topo.euler = static_cast<int>(classes.size()) - (interior_edges + static_cast<int>(boundary.size())) +
               static_cast<int>(faces.size());
  std::vector<char> seen(mesh.num_halfedges(), 0);
  for (int h : boundary) {
    if (seen[h]) continue;
    ++topo.boundary_loops;
    int g = h;
    while (!seen[g]) {
      seen[g] = 1;
      const auto [nxt, fan] = next_boundary(mesh, g, in_region, cut);
      if (fan == 1) ++topo.convex_corners;
      if (fan >= 3) topo.concave_excess += fan - 2;
      g = nxt;
    }
  }
  topo.genus = (2 - topo.euler - topo.boundary_loops) / 2;
  return topo;
}

std::vector<std::vector<int>> flood_regions(const Mesh& mesh, const std::vector<char>& cut,
                                            std::vector<int>& face_region) {
  face_region.assign(mesh.num_faces(), -1);
  std::vector<std::vector<int>> regions;
  for (int s = 0; s < mesh.num_faces(); ++s) {
    if (face_region[s] >= 0) continue;
    const int id = static_cast<int>(regions.size());
    std::vector<int> faces{s};
    face_region[s] = id;
    for (size_t k = 0; k < faces.size(); ++k) {
      for (int h : mesh.face_halfedges(faces[k])) {
        const int g = mesh.face(Mesh::twin(h));
        if (g < 0 || cut[Mesh::edge(h)] || face_region[g] >= 0) continue;
        face_region[g] = id;
        faces.push_back(g);
      }
    }
    std::sort(faces.begin(), faces.end());
    regions.push_back(std::move(faces));
  }
  return regions;
}

BaseComplex build_base_complex(const Mesh& mesh, const BaseComplexOptions& options) {
  const auto irregular = irregular_vertices(mesh);
  BaseComplex bc;
  auto& cut = bc.separatrix_edge;
  cut.assign(mesh.num_edges(), 0);

  std::set<std::vector<int>> seen_paths;
  auto add_path = [&](std::vector<int> path) {
    std::vector<int> key;
    for (int h : path) key.push_back(Mesh::edge(h));
    std::sort(key.begin(), key.end());
    if (!seen_paths.insert(key).second) return;
    for (int e : key) cut[e] = 1;
    bc.separatrices.push_back(std::move(path));
  };
  for (const auto& iv : irregular) {
    for (int h : mesh.outgoing(iv.vertex)) {
      if (mesh.is_boundary_edge(Mesh::edge(h))) continue;
      add_path(trace_ray(mesh, h));
    }
  }
  for (const auto& loop : mesh.boundary_loops()) {
    std::vector<int> path;
    for (int h : loop) path.push_back(Mesh::twin(h));
    std::reverse(path.begin(), path.end());
    add_path(std::move(path));
  }
  for (const auto& loop : options.extra_separatrices) add_path(loop.halfedges);

  const std::vector<double> lengths =
      options.edge_lengths.empty() ? assign_ring_lengths(mesh) : options.edge_lengths;

  std::vector<char> in_region(mesh.num_faces(), 0);
  std::vector<std::vector<int>> regions;
  while (true) {
    regions = flood_regions(mesh, cut, bc.face_chart);
    int bad = -1;
    int bad_defect = 0;
    for (size_t r = 0; r < regions.size(); ++r) {
      const int d = region_topology(mesh, regions[r], cut).defect();
      if (d > 0) {
        bad = static_cast<int>(r);
        bad_defect = d;
        break;
      }
    }
    if (bad < 0) break;

    const auto& faces = regions[bad];
    for (int f : faces) in_region[f] = 1;
    std::vector<char> touched(mesh.num_vertices(), 0);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (cut[e]) {
        touched[mesh.head(2 * e)] = 1;
        touched[mesh.tail(2 * e)] = 1;
      }
    }
    std::vector<char> considered(mesh.num_edges(), 0);
    std::optional<Candidate> best;
    for (int f : faces) {
      for (int h : mesh.face_halfedges(f)) {
        const int e = Mesh::edge(h);
        if (considered[e] || !crosses(mesh, h, in_region, cut)) continue;
        Candidate cand;
        cand.edges = interior_segment(mesh, e, touched);
        cand.min_edge = *std::min_element(cand.edges.begin(), cand.edges.end());
        for (int x : cand.edges) {
          considered[x] = 1;
          cand.length += lengths[x];
        }
        if (best && (cand.length > best->length ||
                     (cand.length == best->length && cand.min_edge > best->min_edge))) {
          continue;
        }
        for (int x : cand.edges) cut[x] = 1;
        const int d = total_defect(mesh, faces, cut, in_region);
        for (int x : cand.edges) cut[x] = 0;
        if (d < bad_defect) best = std::move(cand);
      }
    }
    for (int f : faces) in_region[f] = 0;
    if (!best) {
      throw Error("base complex: chart " + std::to_string(bad) +
                  " cannot be made a quadrilateral disk by loop insertion");
    }
    for (int x : best->edges) cut[x] = 1;
    bc.inserted_loops.push_back(best->edges);
  }

  for (size_t r = 0; r < regions.size(); ++r) {
    auto chart = grid_layout(mesh, regions[r], cut, in_region);
    if (!chart) {
      throw Error("base complex: chart " + std::to_string(r) + " has no consistent grid layout");
    }
    bc.charts.push_back(std::move(*chart));
  }

  std::set<std::pair<int, int>> adj;
  std::set<int> self;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!cut[e] || mesh.is_boundary_edge(e)) continue;
    const int a = bc.face_chart[mesh.face(2 * e)];
    const int b = bc.face_chart[mesh.face(2 * e + 1)];
    if (a == b) {
      self.insert(a);
    } else {
      adj.insert({std::min(a, b), std::max(a, b)});
    }
  }
  bc.adjacency.assign(adj.begin(), adj.end());
  bc.self_adjacent.assign(self.begin(), self.end());
  return bc;
}

BaseComplex build_base_complex_with_features(const Mesh& mesh) {
  BaseComplexOptions options;
  options.extra_separatrices = sharp_edge_loops(mesh, detect_sharp_edges(mesh));
  return build_base_complex(mesh, options);
}

}  // namespace quadkit
