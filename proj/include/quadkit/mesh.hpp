#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadkit/geometry.hpp"

namespace quadkit {

/// Indexed polygons as read from disk, before half-edge construction.
struct PolygonSoup {
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> faces;
  /// Polylines (`l` records in OBJ), used for feature curves.
  std::vector<std::vector<int>> lines;
};

/// Diagnostics gathered while turning a soup into a half-edge mesh.
struct ManifoldReport {
  /// Undirected edges (vertex pairs) shared by more than two faces.
  std::vector<std::pair<int, int>> nonmanifold_edges;
  /// Input face indices dropped in diagnostic mode.
  std::vector<int> dropped_faces;
  int degenerate_faces_removed = 0;
  int duplicate_vertices_merged = 0;
  int reoriented_faces = 0;
  bool orientable = true;

  bool ok() const { return nonmanifold_edges.empty() && orientable; }
};

class NonManifoldError : public InputError {
 public:
  NonManifoldError(std::string what, std::vector<std::pair<int, int>> edges)
      : InputError(std::move(what)), edges_(std::move(edges)) {}
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  std::vector<std::pair<int, int>> edges_;
};

enum class MeshKind { Triangle, Quad, Mixed };

/// Options for building a half-edge mesh from polygons.
struct BuildOptions {
  /// Drop offending faces instead of throwing on non-manifold edges.
  bool diagnostic = false;
  /// Remove faces whose area is below `degenerate_area * bbox_diagonal^2`.
  double degenerate_area = 1e-12;
  /// Flip faces to a consistent orientation per connected component.
  bool fix_orientation = true;
};

/// Edge-manifold, oriented polygon mesh stored as half-edges.
///
/// Half-edges 2e and 2e+1 are the two sides of edge e, so twin(h) == h ^ 1.
/// Boundary half-edges have face() == -1 and are linked along boundary loops.
/// Immutable after construction apart from feature tags.
class Mesh {
 public:
  Mesh() = default;

  static Mesh from_polygons(std::vector<Vec3> positions, std::vector<std::vector<int>> faces,
                            const BuildOptions& options = {}, ManifoldReport* report = nullptr);
  static Mesh from_soup(const PolygonSoup& soup, const BuildOptions& options = {},
                        ManifoldReport* report = nullptr);

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_faces() const { return static_cast<int>(face_halfedge_.size()); }
  int num_halfedges() const { return static_cast<int>(to_vertex_.size()); }
  int num_edges() const { return num_halfedges() / 2; }

  static int twin(int h) { return h ^ 1; }
  static int edge(int h) { return h >> 1; }
  static int halfedge(int e, int side) { return 2 * e + side; }

  int next(int h) const { return next_[h]; }
  int prev(int h) const { return prev_[h]; }
  int head(int h) const { return to_vertex_[h]; }
  int tail(int h) const { return to_vertex_[twin(h)]; }
  int face(int h) const { return face_[h]; }

  bool is_boundary_halfedge(int h) const { return face_[h] < 0; }
  bool is_boundary_edge(int e) const {
    return face_[2 * e] < 0 || face_[2 * e + 1] < 0;
  }
  bool is_boundary_vertex(int v) const;

  /// An outgoing half-edge of v; for boundary vertices the first one in CCW order
  /// (its twin is a boundary half-edge). -1 for isolated vertices.
  int vertex_halfedge(int v) const { return vertex_halfedge_[v]; }
  /// Outgoing half-edges of v in CCW order.
  std::vector<int> outgoing(int v) const;
  int valence(int v) const { return static_cast<int>(outgoing(v).size()); }
  /// Faces incident to v in CCW order.
  std::vector<int> vertex_faces(int v) const;

  int face_halfedge(int f) const { return face_halfedge_[f]; }
  int face_degree(int f) const { return face_degree_[f]; }
  std::vector<int> face_vertices(int f) const;
  std::vector<int> face_halfedges(int f) const;
  /// Edge-adjacent faces of f (one per non-boundary side, may repeat).
  std::vector<int> face_neighbors(int f) const;
  /// The face on the other side of edge e from f, -1 on boundary.
  int opposite_face(int f, int e) const;

  const Vec3& position(int v) const { return positions_[v]; }
  const std::vector<Vec3>& positions() const { return positions_; }

  Vec3 face_center(int f) const;
  /// Unit normal (Newell); zero for degenerate faces.
  Vec3 face_normal(int f) const;
  /// Fan triangulation from the first vertex. For quads this is the v0-v2 diagonal split.
  double face_area(int f) const;
  double edge_length(int e) const;
  Vec3 edge_midpoint(int e) const;
  BBox bbox() const { return bounding_box(positions_); }

  bool is_pure_quad() const;
  bool is_pure_triangle() const;
  MeshKind kind() const;

  /// Boundary loops as half-edge cycles.
  std::vector<std::vector<int>> boundary_loops() const;
  int num_components() const;
  /// V - E + F.
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

  std::vector<std::vector<int>> face_polygons() const;
  /// Same connectivity, new geometry.
  Mesh with_positions(std::vector<Vec3> positions) const;

  bool is_feature_edge(int e) const { return !edge_feature_.empty() && edge_feature_[e] != 0; }
  void set_feature_edges(const std::vector<bool>& flags);
  std::vector<bool> feature_edges() const;
  /// Finds the edge joining a and b, or -1.
  int find_edge(int a, int b) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<int> to_vertex_;
  std::vector<int> face_;
  std::vector<int> next_;
  std::vector<int> prev_;
  std::vector<int> vertex_halfedge_;
  std::vector<int> face_halfedge_;
  std::vector<int> face_degree_;
  std::vector<uint8_t> edge_feature_;
};

}  // namespace quadkit
