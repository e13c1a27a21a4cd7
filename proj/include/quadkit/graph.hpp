#pragma once

#include <utility>
#include <vector>

#include "quadkit/base_complex.hpp"
#include "quadkit/chart_fields.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

/// Simple undirected graph: no loops, no repeated edges, pairs stored as (lo, hi) sorted.
struct Graph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;

  static Graph from_pairs(int nodes, std::vector<std::pair<int, int>> pairs);
};

bool isomorphic(const Graph& a, const Graph& b);

/// Charts of a base complex, adjacent when they share a separatrix segment.
Graph chart_graph(const BaseComplex& complex);
/// Faces of a polygon mesh, adjacent when they share an edge.
Graph face_graph(const Mesh& mesh);

/// The chart layout implied by densifying every subchart of `split` into an N x N grid:
/// its patches as welded quads over the surface. N = 1 gives the subcharts themselves.
struct DensifiedLayout {
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> quads;
};
DensifiedLayout densified_layout(const ChartSplit& split, int density);
Graph densified_graph(const ChartSplit& split, int density);

}  // namespace quadkit
