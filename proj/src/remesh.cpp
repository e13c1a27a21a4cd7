#include "quadkit/remesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "quadkit/features.hpp"
#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

enum class Pin : uint8_t { Free, Line, Corner };

uint64_t key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

// Triangle soup with vertex-face incidence, edited in place.
class Work {
 public:
  std::vector<Vec3> pos;
  std::vector<Pin> pin;
  std::vector<char> boundary;
  std::vector<std::array<int, 3>> tri;
  std::vector<char> alive;
  std::vector<std::vector<int>> vfaces;
  std::unordered_set<uint64_t> feature;

  int add_vertex(const Vec3& p, Pin kind, bool on_boundary) {
    pos.push_back(p);
    pin.push_back(kind);
    boundary.push_back(on_boundary);
    vfaces.emplace_back();
    return static_cast<int>(pos.size()) - 1;
  }

  int add_face(const std::array<int, 3>& t) {
    tri.push_back(t);
    alive.push_back(1);
    const int f = static_cast<int>(tri.size()) - 1;
    for (int v : t) vfaces[v].push_back(f);
    return f;
  }

  void detach(int f, int v) {
    auto& l = vfaces[v];
    l.erase(std::find(l.begin(), l.end(), f));
  }

  void kill(int f) {
    alive[f] = 0;
    for (int v : tri[f]) detach(f, v);
  }

  bool is_feature(int a, int b) const { return feature.count(key(a, b)) > 0; }

  std::vector<int> edge_faces(int a, int b) const {
    std::vector<int> out;
    for (int f : vfaces[a]) {
      const auto& t = tri[f];
      if (t[0] == b || t[1] == b || t[2] == b) out.push_back(f);
    }
    return out;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int f : vfaces[v]) {
      for (int w : tri[f]) {
        if (w != v) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_boundary_edge(int a, int b) const { return edge_faces(a, b).size() == 1; }

  bool is_boundary_vertex(int v) const { return boundary[v] != 0; }

  static int opposite(const std::array<int, 3>& t, int a, int b) {
    for (int v : t) {
      if (v != a && v != b) return v;
    }
    return -1;
  }

  Vec3 normal(const std::array<int, 3>& t) const {
    return (pos[t[1]] - pos[t[0]]).cross(pos[t[2]] - pos[t[0]]);
  }

  Vec3 vertex_normal(int v) const {
    Vec3 n = Vec3::Zero();
    for (int f : vfaces[v]) n += normal(tri[f]);
    return n.norm() > 0 ? Vec3(n.normalized()) : n;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (size_t f = 0; f < tri.size(); ++f) {
      if (!alive[f]) continue;
      for (int i = 0; i < 3; ++i) {
        const int a = tri[f][i], b = tri[f][(i + 1) % 3];
        if (a < b || edge_faces(a, b).size() == 1) out.emplace_back(a, b);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

void split_edge(Work& w, int a, int b) {
  const Pin kind = w.is_feature(a, b) ? Pin::Line : Pin::Free;
  const int m = w.add_vertex(0.5 * (w.pos[a] + w.pos[b]), kind, w.is_boundary_edge(a, b));
  if (kind == Pin::Line) {
    w.feature.erase(key(a, b));
    w.feature.insert(key(a, m));
    w.feature.insert(key(m, b));
  }
  for (int f : w.edge_faces(a, b)) {
    auto t = w.tri[f];
    auto g = t;
    for (int& v : g) {
      if (v == a) v = m;
    }
    for (int& v : t) {
      if (v == b) v = m;
    }
    w.detach(f, b);
    w.tri[f] = t;
    w.vfaces[m].push_back(f);
    w.add_face(g);
  }
}

// Collapses a into b if every constraint allows it.
bool try_collapse(Work& w, int a, int b, double max_len) {
  if (w.pin[a] == Pin::Corner) return false;
  const bool along_feature = w.is_feature(a, b);
  if (w.pin[a] == Pin::Line && !along_feature) return false;
  const auto shared = w.edge_faces(a, b);
  if (shared.empty()) return false;
  if (!along_feature && w.is_boundary_vertex(a) && w.is_boundary_vertex(b)) return false;

  // Link condition.
  std::vector<int> opp;
  for (int f : shared) opp.push_back(Work::opposite(w.tri[f], a, b));
  std::sort(opp.begin(), opp.end());
  const auto na = w.neighbors(a);
  const auto nb = w.neighbors(b);
  std::vector<int> common;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
  if (common != opp) return false;

  for (int x : na) {
    if (x != b && (w.pos[x] - w.pos[b]).norm() > max_len) return false;
  }
  for (int f : w.vfaces[a]) {
    if (std::find(shared.begin(), shared.end(), f) != shared.end()) continue;
    auto t = w.tri[f];
    const Vec3 before = w.normal(t);
    for (int& v : t) {
      if (v == a) v = b;
    }
    const Vec3 after = w.normal(t);
    if (after.norm() < 1e-12 * before.norm() || after.dot(before) <= 0.2 * after.norm() * before.norm())
      return false;
  }

  std::vector<uint64_t> moved;
  for (int x : na) {
    if (x != b && w.is_feature(a, x)) moved.push_back(key(a, x));
  }
  w.feature.erase(key(a, b));
  for (uint64_t k : moved) {
    w.feature.erase(k);
    const int lo = static_cast<int>(k >> 32), hi = static_cast<int>(k & 0xffffffffu);
    w.feature.insert(key(b, lo == a ? hi : lo));
  }
  for (int f : shared) w.kill(f);
  for (int f : std::vector<int>(w.vfaces[a])) {
    for (int& v : w.tri[f]) {
      if (v == a) v = b;
    }
    w.vfaces[b].push_back(f);
  }
  w.vfaces[a].clear();
  return true;
}

bool try_flip(Work& w, int a, int b) {
  if (w.is_feature(a, b)) return false;
  const auto shared = w.edge_faces(a, b);
  if (shared.size() != 2) return false;
  // Orient so that the first face runs a -> b.
  int f1 = shared[0], f2 = shared[1];
  auto runs = [&](int f, int x, int y) {
    const auto& t = w.tri[f];
    for (int i = 0; i < 3; ++i) {
      if (t[i] == x && t[(i + 1) % 3] == y) return true;
    }
    return false;
  };
  if (!runs(f1, a, b)) std::swap(f1, f2);
  if (!runs(f1, a, b) || !runs(f2, b, a)) return false;
  const int c = Work::opposite(w.tri[f1], a, b);
  const int d = Work::opposite(w.tri[f2], a, b);
  if (c == d || !w.edge_faces(c, d).empty()) return false;

  auto target = [&](int v) { return w.is_boundary_vertex(v) ? 4 : 6; };
  auto val = [&](int v) { return static_cast<int>(w.neighbors(v).size()); };
  const int va = val(a), vb = val(b), vc = val(c), vd = val(d);
  auto dev = [](int v, int t) { return std::abs(v - t); };
  const int before = dev(va, target(a)) + dev(vb, target(b)) + dev(vc, target(c)) + dev(vd, target(d));
  const int after = dev(va - 1, target(a)) + dev(vb - 1, target(b)) + dev(vc + 1, target(c)) +
                    dev(vd + 1, target(d));
  if (after >= before) return false;

  const std::array<int, 3> t1{a, d, c}, t2{d, b, c};
  const Vec3 n_old = w.normal(w.tri[f1]).normalized() + w.normal(w.tri[f2]).normalized();
  const Vec3 n1 = w.normal(t1), n2 = w.normal(t2);
  if (n1.dot(n_old) <= 0 || n2.dot(n_old) <= 0 || n1.dot(n2) <= 0.5 * n1.norm() * n2.norm())
    return false;
  w.kill(f1);
  w.kill(f2);
  w.add_face(t1);
  w.add_face(t2);
  return true;
}

struct Reference {
  TriangleIndex surface;
  std::vector<std::array<Vec3, 2>> segments;

  Vec3 project_surface(const Vec3& p) const { return surface.closest(p).point; }

  Vec3 project_feature(const Vec3& p) const {
    Vec3 best = p;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& s : segments) {
      const double t = closest_param_on_segment(p, s[0], s[1]);
      const Vec3 q = s[0] + t * (s[1] - s[0]);
      const double d = (q - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    return best;
  }
};

void relax(Work& w, const Reference& ref) {
  std::vector<Vec3> next = w.pos;
  for (size_t v = 0; v < w.pos.size(); ++v) {
    if (w.vfaces[v].empty() || w.pin[v] == Pin::Corner) continue;
    const auto nb = w.neighbors(static_cast<int>(v));
    if (w.pin[v] == Pin::Line) {
      std::vector<int> along;
      for (int x : nb) {
        if (w.is_feature(static_cast<int>(v), x)) along.push_back(x);
      }
      if (along.size() != 2) continue;
      const Vec3 t = (w.pos[along[0]] - w.pos[along[1]]).normalized();
      const Vec3 c = 0.5 * (w.pos[along[0]] + w.pos[along[1]]);
      next[v] = ref.project_feature(w.pos[v] + t * t.dot(c - w.pos[v]));
      continue;
    }
    Vec3 c = Vec3::Zero();
    double wsum = 0;
    for (int f : w.vfaces[v]) {
      const auto& t = w.tri[f];
      const double area = 0.5 * w.normal(t).norm();
      c += area * (w.pos[t[0]] + w.pos[t[1]] + w.pos[t[2]]) / 3.0;
      wsum += area;
    }
    if (wsum <= 0) continue;
    c /= wsum;
    const Vec3 n = w.vertex_normal(static_cast<int>(v));
    const Vec3 d = c - w.pos[v];
    next[v] = ref.project_surface(w.pos[v] + d - n * n.dot(d));
  }
  w.pos = std::move(next);
}

}  // namespace

double implied_face_count(const Mesh& mesh, double length) {
  double area = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) area += mesh.face_area(f);
  return area / (std::sqrt(3.0) / 4.0 * length * length);
}

Mesh isotropic_remesh(const Mesh& mesh, const RemeshOptions& options) {
  if (!mesh.is_pure_triangle()) throw InputError("isotropic_remesh: triangle mesh required");
  const double L = options.target * mesh.bbox().diagonal();
  if (!(L > 0)) throw InputError("isotropic_remesh: empty or degenerate mesh");

  std::vector<bool> sharp(mesh.num_edges(), false);
  if (options.preserve_sharp) {
    sharp = detect_sharp_edges(mesh, options.sharp_angle);
  } else {
    for (int e = 0; e < mesh.num_edges(); ++e) sharp[e] = mesh.is_boundary_edge(e);
  }

  Work w;
  Reference ref;
  ref.surface = TriangleIndex(mesh_triangles(mesh));
  std::vector<std::vector<int>> feature_nb(mesh.num_vertices());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!sharp[e]) continue;
    const int a = mesh.tail(2 * e), b = mesh.head(2 * e);
    feature_nb[a].push_back(b);
    feature_nb[b].push_back(a);
    ref.segments.push_back({mesh.position(a), mesh.position(b)});
    w.feature.insert(key(a, b));
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Pin kind = Pin::Free;
    const auto& nb = feature_nb[v];
    if (nb.size() == 2) {
      const Vec3 in = mesh.position(v) - mesh.position(nb[0]);
      const Vec3 out = mesh.position(nb[1]) - mesh.position(v);
      kind = degrees(angle_between(in, out)) > options.corner_turn ? Pin::Corner : Pin::Line;
    } else if (!nb.empty()) {
      kind = Pin::Corner;
    }
    w.add_vertex(mesh.position(v), kind, mesh.is_boundary_vertex(v));
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto v = mesh.face_vertices(f);
    w.add_face({v[0], v[1], v[2]});
  }

  const double hi = 4.0 / 3.0 * L, lo = 4.0 / 5.0 * L;
  for (int it = 0; it < options.iterations; ++it) {
    for (auto [a, b] : w.edges()) {
      if ((w.pos[a] - w.pos[b]).norm() > hi && !w.edge_faces(a, b).empty()) split_edge(w, a, b);
    }
    for (auto [a, b] : w.edges()) {
      if (w.vfaces[a].empty() || w.vfaces[b].empty() || w.edge_faces(a, b).empty()) continue;
      if ((w.pos[a] - w.pos[b]).norm() >= lo) continue;
      if (!try_collapse(w, a, b, hi)) try_collapse(w, b, a, hi);
    }
    for (auto [a, b] : w.edges()) {
      if (!w.edge_faces(a, b).empty()) try_flip(w, a, b);
    }
    relax(w, ref);
  }
  // Relaxation can stretch a few edges past the split threshold.
  const size_t before_split = w.pos.size();
  for (auto [a, b] : w.edges()) {
    if ((w.pos[a] - w.pos[b]).norm() > hi && !w.edge_faces(a, b).empty()) split_edge(w, a, b);
  }
  for (size_t v = before_split; v < w.pos.size(); ++v) {
    w.pos[v] = w.pin[v] == Pin::Line ? ref.project_feature(w.pos[v]) : ref.project_surface(w.pos[v]);
  }

  std::vector<int> remap(w.pos.size(), -1);
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> faces;
  for (size_t f = 0; f < w.tri.size(); ++f) {
    if (!w.alive[f]) continue;
    std::vector<int> face;
    for (int v : w.tri[f]) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(positions.size());
        positions.push_back(w.pos[v]);
      }
      face.push_back(remap[v]);
    }
    faces.push_back(std::move(face));
  }
  Mesh out = Mesh::from_polygons(std::move(positions), std::move(faces));
  std::vector<bool> flags(out.num_edges(), false);
  for (uint64_t k : w.feature) {
    const int a = remap[k >> 32], b = remap[k & 0xffffffffu];
    if (a < 0 || b < 0) continue;
    const int e = out.find_edge(a, b);
    if (e >= 0) flags[e] = true;
  }
  out.set_feature_edges(flags);
  return out;
}

}  // namespace quadkit
