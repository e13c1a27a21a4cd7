#include "quadkit/graph.hpp"

#include <algorithm>
#include <map>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/isomorphism.hpp>

namespace quadkit {
namespace {

using BoostGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;

BoostGraph to_boost(const Graph& g) {
  BoostGraph out(g.nodes);
  for (auto [a, b] : g.edges) boost::add_edge(a, b, out);
  return out;
}

Graph polygon_graph(const std::vector<std::vector<int>>& faces) {
  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    for (size_t i = 0; i < face.size(); ++i) {
      const int a = face[i], b = face[(i + 1) % face.size()];
      by_edge[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(f));
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [e, fs] : by_edge) {
    for (size_t i = 0; i < fs.size(); ++i) {
      for (size_t j = i + 1; j < fs.size(); ++j) pairs.emplace_back(fs[i], fs[j]);
    }
  }
  return Graph::from_pairs(static_cast<int>(faces.size()), std::move(pairs));
}

}  // namespace

Graph Graph::from_pairs(int nodes, std::vector<std::pair<int, int>> pairs) {
  Graph g;
  g.nodes = nodes;
  for (auto& [a, b] : pairs) {
    if (a > b) std::swap(a, b);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (auto [a, b] : pairs) {
    if (a != b) g.edges.emplace_back(a, b);
  }
  return g;
}

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.nodes != b.nodes || a.edges.size() != b.edges.size()) return false;
  if (a.nodes == 0) return true;
  const BoostGraph ga = to_boost(a), gb = to_boost(b);
  return boost::isomorphism(ga, gb);
}

Graph chart_graph(const BaseComplex& complex) {
  return Graph::from_pairs(complex.num_charts(), complex.adjacency);
}

Graph face_graph(const Mesh& mesh) { return polygon_graph(mesh.face_polygons()); }

DensifiedLayout densified_layout(const ChartSplit& split, int density) {
  if (density < 1) throw Error("densified_layout: density must be at least 1");
  const int n = density;
  const double tol = 1e-7 * std::max(split.diagonal, 1e-300);
  DensifiedLayout out;
  auto weld = [&](const Vec3& p) {
    for (size_t i = 0; i < out.positions.size(); ++i) {
      if ((out.positions[i] - p).norm() <= tol) return static_cast<int>(i);
    }
    out.positions.push_back(p);
    return static_cast<int>(out.positions.size()) - 1;
  };
  for (int s = 0; s < static_cast<int>(split.subcharts.size()); ++s) {
    std::vector<int> node((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        node[j * (n + 1) + i] = weld(split.point_at(s, static_cast<double>(i) / n, static_cast<double>(j) / n));
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        out.quads.push_back({node[j * (n + 1) + i], node[j * (n + 1) + i + 1],
                             node[(j + 1) * (n + 1) + i + 1], node[(j + 1) * (n + 1) + i]});
      }
    }
  }
  return out;
}

Graph densified_graph(const ChartSplit& split, int density) {
  return polygon_graph(densified_layout(split, density).quads);
}

}  // namespace quadkit
