#include "quadkit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace quadkit {
namespace {

uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<uint64_t>(std::min(a, b));
  const auto hi = static_cast<uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double polygon_area(const std::vector<Vec3>& positions, const std::vector<int>& face) {
  std::vector<Vec3> pts;
  pts.reserve(face.size());
  for (int v : face) pts.push_back(positions[v]);
  return 0.5 * newell_normal(pts).norm();
}

std::string format_edges(const std::vector<std::pair<int, int>>& edges) {
  std::ostringstream os;
  for (size_t i = 0; i < edges.size() && i < 16; ++i) {
    os << (i ? ", " : "") << "(" << edges[i].first << "," << edges[i].second << ")";
  }
  if (edges.size() > 16) os << ", ...";
  return os.str();
}

}  // namespace

Mesh Mesh::from_soup(const PolygonSoup& soup, const BuildOptions& options,
                     ManifoldReport* report) {
  return from_polygons(soup.positions, soup.faces, options, report);
}

Mesh Mesh::from_polygons(std::vector<Vec3> positions, std::vector<std::vector<int>> faces,
                         const BuildOptions& options, ManifoldReport* report) {
  ManifoldReport local;
  ManifoldReport& rep = report ? *report : local;
  const int nv = static_cast<int>(positions.size());

  // Load-time cleaning: out-of-range indices are a hard error, degenerate faces are dropped.
  const double diag = bounding_box(positions).diagonal();
  const double area_tol = options.degenerate_area * diag * diag;
  std::vector<std::vector<int>> clean;
  std::vector<int> source_index;
  clean.reserve(faces.size());
  for (size_t fi = 0; fi < faces.size(); ++fi) {
    auto& f = faces[fi];
    for (int v : f) {
      if (v < 0 || v >= nv) {
        throw InputError("face " + std::to_string(fi) + " references vertex " +
                         std::to_string(v) + " out of range");
      }
    }
    std::vector<int> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    const bool repeated = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    if (f.size() < 3 || repeated || polygon_area(positions, f) <= area_tol) {
      ++rep.degenerate_faces_removed;
      continue;
    }
    clean.push_back(std::move(f));
    source_index.push_back(static_cast<int>(fi));
  }

  // Edge-manifoldness: at most two faces per undirected edge.
  {
    std::unordered_map<uint64_t, int> uses;
    for (const auto& f : clean) {
      for (size_t i = 0; i < f.size(); ++i) ++uses[edge_key(f[i], f[(i + 1) % f.size()])];
    }
    std::vector<std::pair<int, int>> bad;
    for (const auto& [key, count] : uses) {
      if (count > 2) bad.emplace_back(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu));
    }
    std::sort(bad.begin(), bad.end());
    if (!bad.empty()) {
      rep.nonmanifold_edges = bad;
      if (!options.diagnostic) {
        throw NonManifoldError("non-manifold edges: " + format_edges(bad), bad);
      }
      // Keep the first two faces of every edge, drop later ones.
      std::unordered_map<uint64_t, int> kept;
      std::vector<std::vector<int>> filtered;
      std::vector<int> filtered_src;
      for (size_t fi = 0; fi < clean.size(); ++fi) {
        const auto& f = clean[fi];
        bool ok = true;
        for (size_t i = 0; i < f.size(); ++i) {
          auto it = kept.find(edge_key(f[i], f[(i + 1) % f.size()]));
          if (it != kept.end() && it->second >= 2) ok = false;
        }
        if (!ok) {
          rep.dropped_faces.push_back(source_index[fi]);
          continue;
        }
        for (size_t i = 0; i < f.size(); ++i) ++kept[edge_key(f[i], f[(i + 1) % f.size()])];
        filtered.push_back(f);
        filtered_src.push_back(source_index[fi]);
      }
      clean = std::move(filtered);
      source_index = std::move(filtered_src);
    }
  }

  const int nf = static_cast<int>(clean.size());

  // Consistent orientation by BFS over edge-adjacent faces.
  if (options.fix_orientation) {
    std::unordered_map<uint64_t, std::vector<int>> edge_faces;
    for (int f = 0; f < nf; ++f) {
      const auto& poly = clean[f];
      for (size_t i = 0; i < poly.size(); ++i) {
        edge_faces[edge_key(poly[i], poly[(i + 1) % poly.size()])].push_back(f);
      }
    }
    auto has_directed = [&](int f, int a, int b) {
      const auto& poly = clean[f];
      for (size_t i = 0; i < poly.size(); ++i) {
        if (poly[i] == a && poly[(i + 1) % poly.size()] == b) return true;
      }
      return false;
    };
    std::vector<int> state(nf, 0);  // 0 unvisited, 1 visited
    for (int seed = 0; seed < nf; ++seed) {
      if (state[seed]) continue;
      state[seed] = 1;
      std::queue<int> queue;
      queue.push(seed);
      while (!queue.empty()) {
        const int f = queue.front();
        queue.pop();
        const auto poly = clean[f];
        for (size_t i = 0; i < poly.size(); ++i) {
          const int a = poly[i];
          const int b = poly[(i + 1) % poly.size()];
          for (int g : edge_faces[edge_key(a, b)]) {
            if (g == f) continue;
            const bool same_direction = has_directed(g, a, b);
            if (!state[g]) {
              if (same_direction) {
                std::reverse(clean[g].begin(), clean[g].end());
                ++rep.reoriented_faces;
              }
              state[g] = 1;
              queue.push(g);
            } else if (same_direction) {
              rep.orientable = false;
            }
          }
        }
      }
    }
    if (!rep.orientable && !options.diagnostic) {
      throw InputError("mesh is not orientable");
    }
  }

  Mesh m;
  m.positions_ = std::move(positions);
  std::unordered_map<uint64_t, int> edge_ids;
  edge_ids.reserve(static_cast<size_t>(nf) * 3);
  m.face_halfedge_.reserve(nf);
  m.face_degree_.reserve(nf);

  std::vector<std::vector<int>> face_hes;
  face_hes.reserve(nf);
  for (int fi = 0; fi < nf; ++fi) {
    const auto& poly = clean[fi];
    std::vector<int> hes;
    bool conflict = false;
    for (size_t i = 0; i < poly.size(); ++i) {
      const int a = poly[i];
      const int b = poly[(i + 1) % poly.size()];
      const uint64_t key = edge_key(a, b);
      auto it = edge_ids.find(key);
      int h;
      if (it == edge_ids.end()) {
        h = -1;  // allocated below once the whole face is known to be valid
      } else {
        const int e = it->second;
        h = m.to_vertex_[2 * e] == b ? 2 * e : 2 * e + 1;
        if (m.face_[h] >= 0) conflict = true;
      }
      hes.push_back(h);
    }
    if (conflict) {
      if (!options.diagnostic) throw InputError("inconsistent face orientation");
      rep.orientable = false;
      rep.dropped_faces.push_back(source_index[fi]);
      continue;
    }
    const int f = static_cast<int>(m.face_halfedge_.size());
    for (size_t i = 0; i < poly.size(); ++i) {
      if (hes[i] < 0) {
        const int a = poly[i];
        const int b = poly[(i + 1) % poly.size()];
        const int e = static_cast<int>(m.to_vertex_.size() / 2);
        edge_ids.emplace(edge_key(a, b), e);
        m.to_vertex_.push_back(b);
        m.to_vertex_.push_back(a);
        m.face_.push_back(-1);
        m.face_.push_back(-1);
        hes[i] = 2 * e;
      }
      m.face_[hes[i]] = f;
    }
    m.face_halfedge_.push_back(hes[0]);
    m.face_degree_.push_back(static_cast<int>(poly.size()));
    face_hes.push_back(std::move(hes));
  }

  const int nh = static_cast<int>(m.to_vertex_.size());
  m.next_.assign(nh, -1);
  m.prev_.assign(nh, -1);
  for (const auto& hes : face_hes) {
    for (size_t i = 0; i < hes.size(); ++i) {
      const int h = hes[i];
      const int n = hes[(i + 1) % hes.size()];
      m.next_[h] = n;
      m.prev_[n] = h;
    }
  }
  // Boundary half-edges: next is found by rotating through the fan at the head vertex.
  for (int h = 0; h < nh; ++h) {
    if (m.face_[h] >= 0) continue;
    int g = twin(h);
    int guard = 0;
    while (m.face_[g] >= 0 && guard++ < nh) g = twin(m.prev_[g]);
    m.next_[h] = g;
    m.prev_[g] = h;
  }

  m.vertex_halfedge_.assign(m.positions_.size(), -1);
  for (int h = 0; h < nh; ++h) {
    const int v = m.tail(h);
    if (m.face_[h] >= 0 && m.face_[twin(h)] < 0) {
      m.vertex_halfedge_[v] = h;
    } else if (m.vertex_halfedge_[v] < 0 && m.face_[h] >= 0) {
      m.vertex_halfedge_[v] = h;
    }
  }
  return m;
}

bool Mesh::is_boundary_vertex(int v) const {
  const int h = vertex_halfedge_[v];
  return h >= 0 && face_[twin(h)] < 0;
}

std::vector<int> Mesh::outgoing(int v) const {
  std::vector<int> out;
  const int start = vertex_halfedge_[v];
  if (start < 0) return out;
  int h = start;
  do {
    out.push_back(h);
    if (face_[h] < 0) break;
    h = twin(prev_[h]);
  } while (h != start && out.size() <= to_vertex_.size());
  return out;
}

std::vector<int> Mesh::vertex_faces(int v) const {
  std::vector<int> out;
  for (int h : outgoing(v)) {
    if (face_[h] >= 0) out.push_back(face_[h]);
  }
  return out;
}

std::vector<int> Mesh::face_halfedges(int f) const {
  std::vector<int> out;
  out.reserve(face_degree_[f]);
  int h = face_halfedge_[f];
  for (int i = 0; i < face_degree_[f]; ++i) {
    out.push_back(h);
    h = next_[h];
  }
  return out;
}

std::vector<int> Mesh::face_vertices(int f) const {
  std::vector<int> out;
  out.reserve(face_degree_[f]);
  int h = face_halfedge_[f];
  for (int i = 0; i < face_degree_[f]; ++i) {
    out.push_back(tail(h));
    h = next_[h];
  }
  return out;
}

std::vector<int> Mesh::face_neighbors(int f) const {
  std::vector<int> out;
  for (int h : face_halfedges(f)) {
    const int g = face_[twin(h)];
    if (g >= 0) out.push_back(g);
  }
  return out;
}

int Mesh::opposite_face(int f, int e) const {
  const int h = 2 * e;
  if (face_[h] == f) return face_[h + 1];
  return face_[h];
}

Vec3 Mesh::face_center(int f) const {
  Vec3 c = Vec3::Zero();
  for (int v : face_vertices(f)) c += positions_[v];
  return c / face_degree_[f];
}

Vec3 Mesh::face_normal(int f) const {
  std::vector<Vec3> pts;
  for (int v : face_vertices(f)) pts.push_back(positions_[v]);
  Vec3 n = newell_normal(pts);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double Mesh::face_area(int f) const {
  const auto vs = face_vertices(f);
  double a = 0.0;
  for (size_t i = 1; i + 1 < vs.size(); ++i) {
    a += triangle_area(positions_[vs[0]], positions_[vs[i]], positions_[vs[i + 1]]);
  }
  return a;
}

double Mesh::edge_length(int e) const {
  return (positions_[to_vertex_[2 * e]] - positions_[to_vertex_[2 * e + 1]]).norm();
}

Vec3 Mesh::edge_midpoint(int e) const {
  return 0.5 * (positions_[to_vertex_[2 * e]] + positions_[to_vertex_[2 * e + 1]]);
}

bool Mesh::is_pure_quad() const {
  return std::all_of(face_degree_.begin(), face_degree_.end(), [](int d) { return d == 4; });
}

bool Mesh::is_pure_triangle() const {
  return std::all_of(face_degree_.begin(), face_degree_.end(), [](int d) { return d == 3; });
}

MeshKind Mesh::kind() const {
  if (is_pure_triangle()) return MeshKind::Triangle;
  if (is_pure_quad()) return MeshKind::Quad;
  return MeshKind::Mixed;
}

std::vector<std::vector<int>> Mesh::boundary_loops() const {
  std::vector<std::vector<int>> loops;
  std::vector<char> seen(to_vertex_.size(), 0);
  for (int h = 0; h < num_halfedges(); ++h) {
    if (face_[h] >= 0 || seen[h]) continue;
    std::vector<int> loop;
    int g = h;
    while (!seen[g]) {
      seen[g] = 1;
      loop.push_back(g);
      g = next_[g];
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

int Mesh::num_components() const {
  std::vector<int> comp(num_faces(), -1);
  int count = 0;
  for (int s = 0; s < num_faces(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = count;
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      for (int g : face_neighbors(f)) {
        if (comp[g] < 0) {
          comp[g] = count;
          stack.push_back(g);
        }
      }
    }
    ++count;
  }
  return count;
}

std::vector<std::vector<int>> Mesh::face_polygons() const {
  std::vector<std::vector<int>> out;
  out.reserve(num_faces());
  for (int f = 0; f < num_faces(); ++f) out.push_back(face_vertices(f));
  return out;
}

Mesh Mesh::with_positions(std::vector<Vec3> positions) const {
  if (positions.size() != positions_.size()) {
    throw Error("with_positions: vertex count mismatch");
  }
  Mesh m = *this;
  m.positions_ = std::move(positions);
  return m;
}

void Mesh::set_feature_edges(const std::vector<bool>& flags) {
  edge_feature_.assign(num_edges(), 0);
  for (int e = 0; e < num_edges() && e < static_cast<int>(flags.size()); ++e) {
    edge_feature_[e] = flags[e] ? 1 : 0;
  }
}

std::vector<bool> Mesh::feature_edges() const {
  std::vector<bool> out(num_edges(), false);
  for (int e = 0; e < num_edges() && e < static_cast<int>(edge_feature_.size()); ++e) {
    out[e] = edge_feature_[e] != 0;
  }
  return out;
}

int Mesh::find_edge(int a, int b) const {
  for (int h : outgoing(a)) {
    if (to_vertex_[h] == b) return edge(h);
  }
  return -1;
}

}  // namespace quadkit
