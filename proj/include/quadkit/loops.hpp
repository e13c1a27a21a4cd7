#pragma once

#include <vector>

#include "quadkit/mesh.hpp"

namespace quadkit {

struct IrregularVertex {
  int vertex = -1;
  int valence = 0;
  bool boundary = false;
};

/// Interior valence 4 and boundary valence 3 are regular. Isolated vertices are ignored.
bool is_regular_vertex(const Mesh& mesh, int v);

/// All vertices violating the regularity rule, including boundary valence-2 corners.
/// Throws InputError if the mesh has non-quad faces.
std::vector<IrregularVertex> irregular_vertices(const Mesh& mesh);

/// Irregular count as reported in tables: boundary valence-2 corners are excluded.
int count_reported_irregular(const std::vector<IrregularVertex>& irregular);

/// An edge-loop: consecutive half-edges meet head-to-tail at regular vertices.
struct EdgeLoop {
  std::vector<int> halfedges;
  std::vector<int> edges;
  /// Polyline nodes. Closed loops do not repeat the first vertex at the end.
  std::vector<int> vertices;
  bool closed = false;
};

/// A face strip together with its edge-ring.
struct FaceLoop {
  std::vector<int> faces;
  /// Edge-ring: the edges crossed, in order. Open loops include both end edges,
  /// so ring.size() == faces.size() + 1; closed loops have ring.size() == faces.size().
  std::vector<int> ring;
  /// Half-edge entering each face (same length as faces).
  std::vector<int> entries;
  bool closed = false;
};

/// Outgoing half-edge that continues `incoming` straight through its head vertex,
/// or -1 if the head is irregular (or the straight continuation is undefined).
int straight_continuation(const Mesh& mesh, int incoming);

EdgeLoop trace_edge_loop(const Mesh& mesh, int start_edge);
FaceLoop trace_face_loop(const Mesh& mesh, int start_edge);

/// Follows edges straight from an outgoing half-edge until an irregular vertex,
/// a boundary-crossing stop, or the start is reached again. Returns the half-edges walked.
std::vector<int> trace_ray(const Mesh& mesh, int outgoing);

/// Every edge-loop, each edge in exactly one loop; ordered by smallest edge id.
std::vector<EdgeLoop> all_edge_loops(const Mesh& mesh);
/// Every face-loop (one per edge-ring), each edge in exactly one ring.
std::vector<FaceLoop> all_face_loops(const Mesh& mesh);

/// Per-edge length where every edge of an edge-ring gets the ring's mean length.
std::vector<double> assign_ring_lengths(const Mesh& mesh);

}  // namespace quadkit
