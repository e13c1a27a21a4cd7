#pragma once

#include <span>
#include <utility>
#include <vector>

#include "quadkit/chart_fields.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

inline constexpr int kSeedRings = 5;

/// Detection radius scaled from the reference density of half a million faces.
int scaled_seed_rings(int face_count, int rings = kSeedRings);

/// Faces whose value beats every face within `rings` edge-adjacency rings. Equal values
/// are resolved in favour of the lower face id. Sorted by face id.
std::vector<int> detect_seeds(const Mesh& mesh, std::span<const double> cdf, int rings = kSeedRings);

struct ClusterOptions {
  /// Faces below this value are walls during the first growth phase.
  double wall = 0.1;
  /// Adjacent clusters merge when more than `merge_fraction` of the faces along their
  /// shared boundary exceed `merge_level`.
  double merge_level = 0.5;
  double merge_fraction = 0.5;
  /// Add the dual-center distance to the growth priority (used for densified fields).
  bool use_dual = false;
  /// Defer growth across sharp edges until nothing else can grow.
  bool block_sharp = true;
};

struct ClusterPartition {
  /// Cluster per face; every face is assigned on return.
  std::vector<int> face_cluster;
  /// Seed face and estimated chart / dual centers per cluster.
  std::vector<int> seed_face;
  std::vector<Vec3> center;
  std::vector<Vec3> dual_center;
  int merges = 0;
  /// Faces that had to be attached after growth stalled.
  int forced = 0;

  int num_clusters() const { return static_cast<int>(seed_face.size()); }
};

/// Priority region growing from `seeds` over per-face field samples. Throws Error when
/// `seeds` is empty.
ClusterPartition cluster_faces(const Mesh& mesh, std::span<const FieldSample> field,
                               const std::vector<int>& seeds, const ClusterOptions& options = {});

/// Pairs (a, b), a < b, of clusters sharing at least one edge.
std::vector<std::pair<int, int>> cluster_adjacency(const Mesh& mesh, const std::vector<int>& face_cluster);

}  // namespace quadkit
