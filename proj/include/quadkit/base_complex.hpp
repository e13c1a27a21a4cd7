#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "quadkit/loops.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

/// One m x n grid patch of the base complex.
///
/// Cell (i, j) lives at index j * m + i. Its bottom half-edge runs from grid vertex (i, j)
/// to (i+1, j); the face is CCW so the remaining corners are (i+1, j+1) and (i, j+1).
struct Chart {
  std::vector<int> faces;
  int m = 0;
  int n = 0;
  std::vector<int> cell_face;
  std::vector<int> cell_bottom;
  /// Mesh vertex at grid node (i, j), index j * (m + 1) + i. A vertex may appear more than
  /// once when the chart touches itself across a cut.
  std::vector<int> grid;
  /// Grid nodes (0,0), (m,0), (m,n), (0,n) as mesh vertices.
  std::array<int, 4> corners{};
  /// Vertex polylines bottom, right, top, left, running CCW around the chart.
  std::array<std::vector<int>, 4> sides;

  int node(int i, int j) const { return grid[j * (m + 1) + i]; }
  int cell(int i, int j) const { return cell_face[j * m + i]; }
};

/// Topological summary of a face region cut open along separatrix edges.
struct RegionTopology {
  int euler = 0;
  int boundary_loops = 0;
  int genus = 0;
  int convex_corners = 0;
  /// Sum over boundary corners of (faces in fan - 2) where a fan has 3 or more faces.
  int concave_excess = 0;

  /// Zero exactly for disks with four convex corners and no concave ones.
  int defect() const;
};

struct BaseComplex {
  std::vector<Chart> charts;
  std::vector<int> face_chart;
  std::vector<char> separatrix_edge;
  /// Traced separatrices as half-edge paths (boundaries and sharp loops included).
  std::vector<std::vector<int>> separatrices;
  /// Edge paths added to repair charts that were not quadrilateral disks.
  std::vector<std::vector<int>> inserted_loops;
  /// Chart adjacency as a simple graph, pairs (a, b) with a < b.
  std::vector<std::pair<int, int>> adjacency;
  /// Charts that border themselves across a separatrix.
  std::vector<int> self_adjacent;

  int num_charts() const { return static_cast<int>(charts.size()); }
};

struct BaseComplexOptions {
  /// Additional separatrices, e.g. sharp feature loops.
  std::vector<EdgeLoop> extra_separatrices;
  /// Per-edge length used to rank inserted loops; ring lengths are used when empty.
  std::vector<double> edge_lengths;
};

/// Topology of the face set `faces` cut along edges flagged in `cut`.
RegionTopology region_topology(const Mesh& mesh, const std::vector<int>& faces,
                               const std::vector<char>& cut);

/// Builds the base complex of a pure quad mesh. Throws InputError on non-quad faces and
/// Error if some chart cannot be repaired by loop insertion.
BaseComplex build_base_complex(const Mesh& mesh, const BaseComplexOptions& options = {});

/// Base complex with sharp loops (default dihedral threshold) as extra separatrices.
BaseComplex build_base_complex_with_features(const Mesh& mesh);

/// Connected components of faces across edges not flagged in `cut`.
std::vector<std::vector<int>> flood_regions(const Mesh& mesh, const std::vector<char>& cut,
                                            std::vector<int>& face_region);

}  // namespace quadkit
