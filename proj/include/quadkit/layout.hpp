#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quadkit/clustering.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

/// Polygonal chart layout: one face per cluster, corners only.
struct LayoutMesh {
  std::vector<Vec3> positions;
  /// Vertex of the clustered mesh each corner came from (-1 once corners are merged).
  std::vector<int> source_vertex;
  std::vector<std::vector<int>> faces;
  std::vector<int> face_cluster;
  /// A surface point well inside each face's cluster (may be empty).
  std::vector<Vec3> face_point;
  /// Side polylines keyed by (lo, hi) corner pair, running from lo to hi.
  std::map<std::pair<int, int>, std::vector<Vec3>> sides;
  std::vector<char> feature_vertex;
  /// Sides made of sharp edges, as (lo, hi) corner pairs.
  std::vector<std::pair<int, int>> feature_edges;

  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_quads() const;
  int num_non_quads() const { return num_faces() - num_quads(); }
  bool is_feature_edge(int a, int b) const;
  /// Half-edge mesh over the used corners. Throws NonManifoldError if not representable.
  Mesh to_mesh() const;
};

/// The partition cannot be turned into a manifold polygonal layout.
class LayoutError : public Error {
 public:
  using Error::Error;
};

struct ExtractOptions {
  /// Boundary vertices whose surface angle differs from 180 degrees by more than this
  /// become corners.
  double boundary_corner = 30.0;
  /// Attempts at splitting clusters that are not disks.
  int max_splits = 8;
};

struct ExtractReport {
  int corners = 0;
  int split_clusters = 0;
  std::vector<std::string> warnings;
};

/// Traces cluster boundaries of a complete partition into a layout. Clusters that are not
/// topological disks are split in two (with a warning). Throws LayoutError when a face ends
/// up with fewer than three corners, repeats a corner, two sides join the same corners or two
/// faces have the same corners.
LayoutMesh extract_layout(const Mesh& mesh, const ClusterPartition& partition,
                          const ExtractOptions& options = {}, ExtractReport* report = nullptr);

/// Feature-aware shortest-first collapse of edges between two non-quads. Returns the
/// number of collapses.
int collapse_to_quads(LayoutMesh& layout);

}  // namespace quadkit
