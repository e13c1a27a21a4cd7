#include "quadkit/refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "quadkit/features.hpp"
#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

enum Kind : char { Interior = 0, Line = 1, Fixed = 2 };

class Projector {
 public:
  explicit Projector(const Mesh& reference) : surface_(mesh_triangles(reference)) {
    std::vector<bool> sharp = reference.feature_edges();
    if (std::none_of(sharp.begin(), sharp.end(), [](bool b) { return b; })) {
      sharp = detect_sharp_edges(reference);
    }
    for (int e = 0; e < reference.num_edges(); ++e) {
      if (sharp[e]) {
        segments_.push_back({reference.position(reference.tail(2 * e)),
                             reference.position(reference.head(2 * e))});
      }
    }
  }

  Vec3 surface(const Vec3& p) const { return surface_.closest(p).point; }

  Vec3 feature(const Vec3& p) const {
    if (segments_.empty()) return surface(p);
    Vec3 best = p;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : segments_) {
      const double t = closest_param_on_segment(p, a, b);
      const Vec3 q = a + t * (b - a);
      const double d = (q - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    return best;
  }

 private:
  TriangleIndex surface_;
  std::vector<std::pair<Vec3, Vec3>> segments_;
};

// Worst corner of face f under `positions`, measured like the scaled Jacobian.
double corner_quality(const std::vector<Vec3>& positions, const Mesh& mesh, int f) {
  const auto vs = mesh.face_vertices(f);
  std::vector<Vec3> pts;
  for (int v : vs) pts.push_back(positions[v]);
  const Vec3 n = newell_normal(pts).normalized();
  const size_t k = pts.size();
  double q = 1.0;
  for (size_t i = 0; i < k; ++i) {
    const Vec3 a = pts[(i + 1) % k] - pts[i], b = pts[(i + k - 1) % k] - pts[i];
    if (a.norm() == 0 || b.norm() == 0) return -1.0;
    q = std::min(q, a.normalized().cross(b.normalized()).dot(n));
  }
  return q;
}

double worst_around(const std::vector<Vec3>& positions, const Mesh& mesh, int v) {
  double q = 1.0;
  for (int f : mesh.vertex_faces(v)) q = std::min(q, corner_quality(positions, mesh, f));
  return q;
}

Vec3 arclength_midpoint(const std::vector<Vec3>& poly) {
  double total = 0;
  for (size_t i = 1; i < poly.size(); ++i) total += (poly[i] - poly[i - 1]).norm();
  double half = 0.5 * total;
  for (size_t i = 1; i < poly.size(); ++i) {
    const double len = (poly[i] - poly[i - 1]).norm();
    if (half <= len && len > 0) return poly[i - 1] + (half / len) * (poly[i] - poly[i - 1]);
    half -= len;
  }
  return poly.back();
}

}  // namespace

Mesh midpoint_subdivide(const Mesh& mesh) {
  std::vector<Vec3> pos = mesh.positions();
  const int nv = mesh.num_vertices(), ne = mesh.num_edges();
  for (int e = 0; e < ne; ++e) pos.push_back(mesh.edge_midpoint(e));
  for (int f = 0; f < mesh.num_faces(); ++f) pos.push_back(mesh.face_center(f));
  std::vector<std::vector<int>> faces;
  std::vector<std::pair<int, int>> features;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto hs = mesh.face_halfedges(f);
    const int n = static_cast<int>(hs.size());
    for (int i = 0; i < n; ++i) {
      const int h = hs[i], before = hs[(i + n - 1) % n];
      faces.push_back({mesh.tail(h), nv + Mesh::edge(h), nv + ne + f, nv + Mesh::edge(before)});
    }
  }
  for (int e = 0; e < ne; ++e) {
    if (!mesh.is_feature_edge(e)) continue;
    features.emplace_back(mesh.tail(2 * e), nv + e);
    features.emplace_back(nv + e, mesh.head(2 * e));
  }
  BuildOptions opts;
  // Keep every face, even flat ones: the result must match the input combinatorially.
  opts.degenerate_area = -1;
  opts.fix_orientation = false;
  Mesh out = Mesh::from_polygons(std::move(pos), std::move(faces), opts);
  std::vector<bool> flags(out.num_edges(), false);
  for (auto [a, b] : features) flags[out.find_edge(a, b)] = true;
  out.set_feature_edges(flags);
  return out;
}

int winslow_smooth(std::vector<Vec3>& positions, const Mesh& mesh, const std::vector<char>& fixed,
                   int sweeps, double tolerance, const std::function<Vec3(const Vec3&)>& project,
                   bool guarded) {
  const double scale = std::max(bounding_box(positions).diagonal(), 1e-300);
  int done = 0;
  for (; done < sweeps;) {
    ++done;
    double moved = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (fixed[v] || mesh.vertex_halfedge(v) < 0 || mesh.is_boundary_vertex(v)) continue;
      const auto out = mesh.outgoing(v);
      Vec3 next = Vec3::Zero();
      bool regular = out.size() == 4;
      for (int h : out) regular = regular && mesh.face_degree(mesh.face(h)) == 4;
      if (regular) {
        std::array<Vec3, 4> n, d;
        for (int i = 0; i < 4; ++i) {
          n[i] = positions[mesh.head(out[i])];
          d[i] = positions[mesh.head(mesh.next(out[i]))];
        }
        const Vec3 xi = 0.5 * (n[0] - n[2]);
        const Vec3 eta = 0.5 * (n[1] - n[3]);
        const double alpha = eta.squaredNorm(), beta = xi.dot(eta), gamma = xi.squaredNorm();
        const Vec3 cross = 0.25 * (d[0] - d[1] + d[2] - d[3]);
        const double denom = 2.0 * (alpha + gamma);
        if (denom <= 0) continue;
        next = (alpha * (n[0] + n[2]) + gamma * (n[1] + n[3]) - 2.0 * beta * cross) / denom;
      } else {
        for (int h : out) next += positions[mesh.head(h)];
        next /= static_cast<double>(out.size());
      }
      if (project) {
        // Move within the tangent plane first: on coarse curved meshes the chord average lies
        // deep inside the surface, where nearest-point projection can jump to another sheet.
        Vec3 normal = Vec3::Zero();
        for (size_t i = 0; i < out.size(); ++i) {
          normal += (positions[mesh.head(out[i])] - positions[v])
                        .cross(positions[mesh.head(out[(i + 1) % out.size()])] - positions[v]);
        }
        if (normal.norm() > 0) {
          normal.normalize();
          next -= normal * normal.dot(next - positions[v]);
        }
        next = project(next);
      }
      if (guarded) {
        const Vec3 keep = positions[v];
        const double before = worst_around(positions, mesh, v);
        positions[v] = next;
        if (worst_around(positions, mesh, v) < before) {
          positions[v] = keep;
          continue;
        }
        positions[v] = keep;
      }
      moved = std::max(moved, (next - positions[v]).norm());
      positions[v] = next;
    }
    if (moved <= tolerance * scale) break;
  }
  return done;
}

Mesh refine(const LayoutMesh& layout, const Mesh& reference, const RefineOptions& options,
            RefineReport* report) {
  RefineReport local;
  RefineReport& rep = report ? *report : local;
  rep = {};
  const Projector project(reference);
  Mesh mesh = layout.to_mesh();
  std::vector<char> kind(mesh.num_vertices(), Fixed);

  for (int level = 0; level < options.max_subdiv; ++level) {
    int next_faces = 0;
    for (int f = 0; f < mesh.num_faces(); ++f) next_faces += mesh.face_degree(f);
    if (next_faces > options.max_faces) break;

    const int nv = mesh.num_vertices(), ne = mesh.num_edges();
    Mesh sub = midpoint_subdivide(mesh);
    std::vector<Vec3> pos = sub.positions();
    kind.resize(sub.num_vertices(), Interior);
    for (int e = 0; e < ne; ++e) {
      const int a = mesh.tail(2 * e), b = mesh.head(2 * e);
      if (level == 0) {
        auto it = layout.sides.find({std::min(a, b), std::max(a, b)});
        if (it != layout.sides.end()) pos[nv + e] = arclength_midpoint(it->second);
      }
      const bool line = mesh.is_feature_edge(e) || mesh.is_boundary_edge(e);
      kind[nv + e] = line ? Line : Interior;
      pos[nv + e] = line ? project.feature(pos[nv + e]) : project.surface(pos[nv + e]);
    }
    if (level == 0 && static_cast<int>(layout.face_point.size()) == mesh.num_faces()) {
      // Corner averages of large curved faces can land nearer another part of the surface.
      for (int f = 0; f < mesh.num_faces(); ++f) pos[nv + ne + f] = layout.face_point[f];
    }
    for (int v = nv + ne; v < sub.num_vertices(); ++v) pos[v] = project.surface(pos[v]);
    if (options.smooth) {
      std::vector<char> fixed(kind.size());
      for (size_t v = 0; v < kind.size(); ++v) fixed[v] = kind[v] != Interior;
      rep.sweeps += winslow_smooth(pos, sub, fixed, options.sweeps, options.tolerance,
                                   [&](const Vec3& p) { return project.surface(p); }, true);
    }
    mesh = sub.with_positions(std::move(pos));
    mesh.set_feature_edges(sub.feature_edges());
    ++rep.levels;
  }
  if (!mesh.is_pure_quad()) {
    // Without a single subdivision non-quad layout faces would survive.
    throw Error("refine: face cap leaves non-quad faces; raise max_faces or max_subdiv");
  }
  return mesh;
}

}  // namespace quadkit
