#include "quadkit/features.hpp"

#include <algorithm>

namespace quadkit {

double dihedral_angle(const Mesh& mesh, int e) {
  const int f0 = mesh.face(Mesh::halfedge(e, 0));
  const int f1 = mesh.face(Mesh::halfedge(e, 1));
  if (f0 < 0 || f1 < 0) return 0.0;
  return 180.0 - degrees(angle_between(mesh.face_normal(f0), mesh.face_normal(f1)));
}

std::vector<bool> detect_sharp_edges(const Mesh& mesh, double angle_threshold) {
  std::vector<bool> sharp(mesh.num_edges(), false);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    sharp[e] = mesh.is_boundary_edge(e) || dihedral_angle(mesh, e) < angle_threshold;
  }
  return sharp;
}

std::vector<EdgeLoop> sharp_edge_loops(const Mesh& mesh, const std::vector<bool>& sharp) {
  std::vector<EdgeLoop> out;
  std::vector<char> seen(mesh.num_edges(), 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (seen[e] || !sharp[e] || mesh.is_boundary_edge(e)) continue;
    auto loop = trace_edge_loop(mesh, e);
    for (int x : loop.edges) seen[x] = 1;
    const bool all_sharp = std::all_of(loop.edges.begin(), loop.edges.end(), [&](int x) {
      return sharp[x] && !mesh.is_boundary_edge(x);
    });
    if (all_sharp) out.push_back(std::move(loop));
  }
  return out;
}

}  // namespace quadkit
