#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "quadkit/geometry.hpp"

namespace quadkit {

struct TaubinOptions {
  int neighbors = 32;
  int iterations = 5;
  double lambda = 0.451;
  double mu = -0.472;
  /// Weight of the normal difference in the affinity.
  double normal_weight = 0.1;
  /// Bandwidth factor applied to the squared nearest-neighbour distance.
  double bandwidth = 8.0;
};

/// Weighted K-nearest-neighbour graph with row-normalised weights.
struct KnnGraph {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<double>> weights;
};

/// Affinities exp(-(|dp|^2 + s |dn|^2) / (r sigma_i^2)) over each point's K nearest neighbours,
/// sigma_i being the distance to the closest one. Rows are normalised to sum to one.
/// Throws InputError on too few points or duplicate positions.
KnnGraph knn_graph(std::span<const Vec3> points, std::span<const Vec3> normals,
                   const TaubinOptions& options = {});

/// Applies (I + mu L)(I + lambda L) `iterations` times, with L = D^-1 W - I, to each column
/// of `signal` (one row per point).
Eigen::MatrixXd regularize_point_signal(std::span<const Vec3> points, std::span<const Vec3> normals,
                                        const Eigen::MatrixXd& signal,
                                        const TaubinOptions& options = {});
Eigen::MatrixXd apply_taubin(const KnnGraph& graph, const Eigen::MatrixXd& signal,
                             const TaubinOptions& options = {});

/// Sum over graph edges of w_ij |z_i - z_j|^2.
double dirichlet_energy(const KnnGraph& graph, const Eigen::MatrixXd& signal);

}  // namespace quadkit
