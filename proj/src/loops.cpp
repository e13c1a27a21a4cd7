#include "quadkit/loops.hpp"

#include <algorithm>

namespace quadkit {
namespace {

void require_quads(const Mesh& mesh) {
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face_degree(f) != 4) {
      throw InputError("quad mesh required (face " + std::to_string(f) + " has " +
                       std::to_string(mesh.face_degree(f)) + " vertices)");
    }
  }
}

// Walks straight from `start` collecting half-edges. Sets `closed` if it returns to start.
std::vector<int> walk_edges(const Mesh& mesh, int start, bool& closed,
                            std::vector<char>& used_edge) {
  std::vector<int> out{start};
  used_edge[Mesh::edge(start)] = 1;
  closed = false;
  int h = start;
  while (true) {
    const int n = straight_continuation(mesh, h);
    if (n < 0) break;
    if (n == start) {
      closed = true;
      break;
    }
    if (used_edge[Mesh::edge(n)]) break;
    used_edge[Mesh::edge(n)] = 1;
    out.push_back(n);
    h = n;
  }
  return out;
}

// Walks across quads starting with the face of `entry`, returning the entering half-edge per face.
std::vector<int> walk_faces(const Mesh& mesh, int entry, bool& closed) {
  std::vector<int> entries;
  closed = false;
  int h = entry;
  const int limit = mesh.num_halfedges();
  while (mesh.face(h) >= 0 && mesh.face_degree(mesh.face(h)) == 4 &&
         static_cast<int>(entries.size()) < limit) {
    entries.push_back(h);
    h = Mesh::twin(mesh.next(mesh.next(h)));
    if (h == entry) {
      closed = true;
      break;
    }
  }
  return entries;
}

}  // namespace

bool is_regular_vertex(const Mesh& mesh, int v) {
  if (mesh.vertex_halfedge(v) < 0) return true;
  const int val = mesh.valence(v);
  return mesh.is_boundary_vertex(v) ? val == 3 : val == 4;
}

std::vector<IrregularVertex> irregular_vertices(const Mesh& mesh) {
  require_quads(mesh);
  std::vector<IrregularVertex> out;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_halfedge(v) < 0 || is_regular_vertex(mesh, v)) continue;
    out.push_back({v, mesh.valence(v), mesh.is_boundary_vertex(v)});
  }
  return out;
}

int count_reported_irregular(const std::vector<IrregularVertex>& irregular) {
  return static_cast<int>(std::count_if(irregular.begin(), irregular.end(), [](const auto& iv) {
    return !(iv.boundary && iv.valence == 2);
  }));
}

int straight_continuation(const Mesh& mesh, int incoming) {
  const int v = mesh.head(incoming);
  const auto out = mesh.outgoing(v);
  if (mesh.is_boundary_vertex(v)) {
    if (out.size() != 3 || !mesh.is_boundary_edge(Mesh::edge(incoming))) return -1;
    const int back = Mesh::twin(incoming);
    if (back == out.front()) return out.back();
    if (back == out.back()) return out.front();
    return -1;
  }
  if (out.size() != 4 || mesh.face(incoming) < 0) return -1;
  return mesh.next(Mesh::twin(mesh.next(incoming)));
}

EdgeLoop trace_edge_loop(const Mesh& mesh, int start_edge) {
  std::vector<char> used(mesh.num_edges(), 0);
  EdgeLoop loop;
  const int h0 = Mesh::halfedge(start_edge, 0);
  bool closed = false;
  auto forward = walk_edges(mesh, h0, closed, used);
  if (closed) {
    loop.halfedges = std::move(forward);
    loop.closed = true;
  } else {
    used[start_edge] = 0;
    bool back_closed = false;
    auto backward = walk_edges(mesh, Mesh::twin(h0), back_closed, used);
    for (size_t i = backward.size(); i-- > 1;) loop.halfedges.push_back(Mesh::twin(backward[i]));
    loop.halfedges.insert(loop.halfedges.end(), forward.begin(), forward.end());
  }
  for (int h : loop.halfedges) loop.edges.push_back(Mesh::edge(h));
  loop.vertices.push_back(mesh.tail(loop.halfedges.front()));
  for (int h : loop.halfedges) loop.vertices.push_back(mesh.head(h));
  if (loop.closed) loop.vertices.pop_back();
  return loop;
}

FaceLoop trace_face_loop(const Mesh& mesh, int start_edge) {
  FaceLoop loop;
  const int h0 = Mesh::halfedge(start_edge, 0);
  bool closed = false;
  auto forward = walk_faces(mesh, h0, closed);
  if (closed) {
    loop.entries = std::move(forward);
    loop.closed = true;
    for (int h : loop.entries) loop.ring.push_back(Mesh::edge(h));
  } else {
    bool back_closed = false;
    auto backward = walk_faces(mesh, Mesh::twin(h0), back_closed);
    // Reverse the backward strip: a face entered through h is left through next(next(h)).
    for (size_t i = backward.size(); i-- > 0;) {
      loop.entries.push_back(mesh.next(mesh.next(backward[i])));
    }
    loop.entries.insert(loop.entries.end(), forward.begin(), forward.end());
    for (int h : loop.entries) loop.ring.push_back(Mesh::edge(h));
    if (loop.entries.empty()) {
      loop.ring.push_back(start_edge);
    } else {
      loop.ring.push_back(Mesh::edge(mesh.next(mesh.next(loop.entries.back()))));
    }
  }
  for (int h : loop.entries) loop.faces.push_back(mesh.face(h));
  return loop;
}

std::vector<int> trace_ray(const Mesh& mesh, int outgoing) {
  std::vector<int> out{outgoing};
  int h = outgoing;
  const int limit = mesh.num_halfedges();
  while (static_cast<int>(out.size()) <= limit) {
    const int n = straight_continuation(mesh, h);
    if (n < 0 || n == outgoing) break;
    out.push_back(n);
    h = n;
  }
  return out;
}

std::vector<EdgeLoop> all_edge_loops(const Mesh& mesh) {
  std::vector<EdgeLoop> loops;
  std::vector<char> seen(mesh.num_edges(), 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (seen[e]) continue;
    auto loop = trace_edge_loop(mesh, e);
    for (int x : loop.edges) seen[x] = 1;
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<FaceLoop> all_face_loops(const Mesh& mesh) {
  std::vector<FaceLoop> loops;
  std::vector<char> seen(mesh.num_edges(), 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (seen[e]) continue;
    auto loop = trace_face_loop(mesh, e);
    for (int x : loop.ring) seen[x] = 1;
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<double> assign_ring_lengths(const Mesh& mesh) {
  std::vector<double> out(mesh.num_edges(), 0.0);
  for (const auto& loop : all_face_loops(mesh)) {
    double sum = 0.0;
    for (int e : loop.ring) sum += mesh.edge_length(e);
    const double mean = sum / static_cast<double>(loop.ring.size());
    for (int e : loop.ring) out[e] = mean;
  }
  return out;
}

}  // namespace quadkit
