#include "quadkit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "quadkit/features.hpp"

namespace quadkit {
namespace {

// Faces within `rings` edge-adjacency rings of f, f excluded.
void ring_faces(const Mesh& mesh, int f, int rings, std::vector<int>& stamp, int tag,
                std::vector<int>& out) {
  out.clear();
  std::vector<int> layer{f};
  stamp[f] = tag;
  for (int r = 0; r < rings && !layer.empty(); ++r) {
    std::vector<int> next;
    for (int g : layer) {
      for (int h : mesh.face_halfedges(g)) {
        const int n = mesh.face(Mesh::twin(h));
        if (n < 0 || stamp[n] == tag) continue;
        stamp[n] = tag;
        next.push_back(n);
        out.push_back(n);
      }
    }
    layer = std::move(next);
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Keeps the smaller root so representatives stay deterministic.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

class Grower {
 public:
  Grower(const Mesh& mesh, std::span<const FieldSample> field, const ClusterOptions& options,
         ClusterPartition& part)
      : mesh_(mesh), field_(field), options_(options), part_(part) {
    if (options.block_sharp) {
      bool tagged = false;
      for (int e = 0; e < mesh.num_edges() && !tagged; ++e) tagged = mesh.is_feature_edge(e);
      sharp_ = tagged ? mesh.feature_edges() : detect_sharp_edges(mesh);
    } else {
      sharp_.assign(mesh.num_edges(), false);
    }
    quantum_ = 1e-9 * std::max(mesh.bbox().diagonal(), 1e-300);
    estimate_.resize(mesh.num_faces());
    dual_estimate_.resize(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
      estimate_[f] = field[f].position + field[f].offset_center;
      dual_estimate_[f] = field[f].position + field[f].offset_dual;
    }
  }

  int add_cluster(int seed) {
    const int c = part_.num_clusters();
    part_.seed_face.push_back(seed);
    part_.center.push_back(estimate_[seed]);
    part_.dual_center.push_back(dual_estimate_[seed]);
    part_.face_cluster[seed] = c;
    return c;
  }

  void push_neighbors(int f) {
    const int c = part_.face_cluster[f];
    for (int h : mesh_.face_halfedges(f)) {
      const int g = mesh_.face(Mesh::twin(h));
      if (g < 0 || part_.face_cluster[g] >= 0) continue;
      const Entry entry{quantized(priority(g, c)), seq_++, g, c};
      if (sharp_[Mesh::edge(h)]) {
        deferred_.push(entry);
      } else {
        queue_.push(entry);
      }
    }
  }

  void push_frontier() {
    for (int f = 0; f < mesh_.num_faces(); ++f) {
      if (part_.face_cluster[f] >= 0) push_neighbors(f);
    }
  }

  void grow(const std::vector<char>& blocked) {
    for (;;) {
      while (!queue_.empty()) {
        const Entry e = queue_.top();
        queue_.pop();
        take(e, blocked);
      }
      // Cross one sharp edge, then resume normal growth.
      bool crossed = false;
      while (!deferred_.empty() && !crossed) {
        const Entry e = deferred_.top();
        deferred_.pop();
        crossed = take(e, blocked);
      }
      if (!crossed) return;
    }
  }

  double priority(int f, int c) const {
    double p = (estimate_[f] - part_.center[c]).norm();
    if (options_.use_dual) p += (dual_estimate_[f] - part_.dual_center[c]).norm();
    return p;
  }

 private:
  using Entry = std::tuple<long long, long long, int, int>;  // priority, sequence, face, cluster

  long long quantized(double p) const { return std::llround(p / quantum_); }

  bool take(const Entry& e, const std::vector<char>& blocked) {
    const int f = std::get<2>(e), c = std::get<3>(e);
    if (part_.face_cluster[f] >= 0 || blocked[f] || !keeps_manifold(f, c)) return false;
    part_.face_cluster[f] = c;
    push_neighbors(f);
    return true;
  }

  // Adding f to c must keep every vertex of f touching c in a single fan.
  bool keeps_manifold(int f, int c) const {
    for (int v : mesh_.face_vertices(f)) {
      const auto fan = mesh_.vertex_faces(v);
      const bool closed = !mesh_.is_boundary_vertex(v);
      const int n = static_cast<int>(fan.size());
      auto inside = [&](int i) { return fan[i] == f || part_.face_cluster[fan[i]] == c; };
      int runs = 0;
      for (int i = 0; i < n; ++i) {
        const bool prev = i > 0 ? inside(i - 1) : (closed ? inside(n - 1) : false);
        if (inside(i) && !prev) ++runs;
      }
      if (runs > 1) return false;
    }
    return true;
  }

  const Mesh& mesh_;
  std::span<const FieldSample> field_;
  const ClusterOptions& options_;
  ClusterPartition& part_;
  std::vector<bool> sharp_;
  std::vector<Vec3> estimate_;
  std::vector<Vec3> dual_estimate_;
  double quantum_ = 1;
  long long seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> deferred_;
};

// Attaches faces growth could not reach, to the neighbouring cluster of lowest priority.
int attach_leftovers(const Mesh& mesh, ClusterPartition& part, const Grower& grower) {
  int forced = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int f = 0; f < mesh.num_faces(); ++f) {
      if (part.face_cluster[f] >= 0) continue;
      int best = -1;
      double best_p = 0;
      for (int g : mesh.face_neighbors(f)) {
        const int c = part.face_cluster[g];
        if (c < 0) continue;
        const double p = grower.priority(f, c);
        if (best < 0 || p < best_p || (p == best_p && c < best)) {
          best = c;
          best_p = p;
        }
      }
      if (best >= 0) {
        part.face_cluster[f] = best;
        ++forced;
        changed = true;
      }
    }
  }
  return forced;
}

// One round of the boundary-value merge rule. Returns the number of merges.
int merge_round(const Mesh& mesh, std::span<const FieldSample> field, ClusterPartition& part,
                const ClusterOptions& options) {
  std::map<std::pair<int, int>, std::set<int>> shared;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int f = mesh.face(2 * e), g = mesh.face(2 * e + 1);
    if (f < 0 || g < 0) continue;
    const int a = part.face_cluster[f], b = part.face_cluster[g];
    if (a == b) continue;
    auto& faces = shared[{std::min(a, b), std::max(a, b)}];
    faces.insert(f);
    faces.insert(g);
  }
  UnionFind uf(part.num_clusters());
  int merges = 0;
  for (const auto& [pair, faces] : shared) {
    const auto high = std::count_if(faces.begin(), faces.end(),
                                    [&](int f) { return field[f].cdf > options.merge_level; });
    if (high > options.merge_fraction * static_cast<double>(faces.size()) &&
        uf.find(pair.first) != uf.find(pair.second)) {
      uf.unite(pair.first, pair.second);
      ++merges;
    }
  }
  if (merges == 0) return 0;
  std::vector<int> relabel(part.num_clusters(), -1);
  ClusterPartition next;
  for (int c = 0; c < part.num_clusters(); ++c) {
    const int r = uf.find(c);
    if (relabel[r] < 0) {
      relabel[r] = next.num_clusters();
      next.seed_face.push_back(part.seed_face[r]);
      next.center.push_back(part.center[r]);
      next.dual_center.push_back(part.dual_center[r]);
    }
    relabel[c] = relabel[r];
  }
  for (int& c : part.face_cluster) c = relabel[c];
  part.seed_face = std::move(next.seed_face);
  part.center = std::move(next.center);
  part.dual_center = std::move(next.dual_center);
  return merges;
}

}  // namespace

int scaled_seed_rings(int face_count, int rings) {
  return std::max(1, static_cast<int>(std::lround(rings * std::sqrt(face_count / 5e5))));
}

std::vector<int> detect_seeds(const Mesh& mesh, std::span<const double> cdf, int rings) {
  if (static_cast<int>(cdf.size()) != mesh.num_faces()) {
    throw InputError("detect_seeds: one value per face required");
  }
  std::vector<int> seeds;
  std::vector<int> stamp(mesh.num_faces(), -1);
  std::vector<int> window;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    ring_faces(mesh, f, rings, stamp, f, window);
    const bool wins = std::all_of(window.begin(), window.end(), [&](int g) {
      return cdf[f] > cdf[g] || (cdf[f] == cdf[g] && f < g);
    });
    if (wins) seeds.push_back(f);
  }
  return seeds;
}

ClusterPartition cluster_faces(const Mesh& mesh, std::span<const FieldSample> field,
                               const std::vector<int>& seeds, const ClusterOptions& options) {
  if (static_cast<int>(field.size()) != mesh.num_faces()) {
    throw InputError("cluster_faces: one field sample per face required");
  }
  if (seeds.empty()) throw Error("cluster_faces: no seeds found");

  ClusterPartition part;
  part.face_cluster.assign(mesh.num_faces(), -1);
  Grower grower(mesh, field, options, part);
  for (int s : seeds) grower.add_cluster(s);

  std::vector<char> walls(mesh.num_faces(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) walls[f] = field[f].cdf < options.wall;
  for (int s : seeds) grower.push_neighbors(s);
  grower.grow(walls);

  // Absorb the walls, then anything still unreachable.
  const std::vector<char> open(mesh.num_faces(), 0);
  grower.push_frontier();
  grower.grow(open);
  part.forced = attach_leftovers(mesh, part, grower);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (part.face_cluster[f] >= 0) continue;
    // A component without seeds gets its own cluster.
    grower.add_cluster(f);
    grower.push_neighbors(f);
    grower.grow(open);
    part.forced += attach_leftovers(mesh, part, grower);
  }

  for (int m; (m = merge_round(mesh, field, part, options)) > 0;) part.merges += m;
  return part;
}

std::vector<std::pair<int, int>> cluster_adjacency(const Mesh& mesh,
                                                   const std::vector<int>& face_cluster) {
  std::set<std::pair<int, int>> pairs;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int f = mesh.face(2 * e), g = mesh.face(2 * e + 1);
    if (f < 0 || g < 0) continue;
    const int a = face_cluster[f], b = face_cluster[g];
    if (a != b) pairs.insert({std::min(a, b), std::max(a, b)});
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace quadkit
