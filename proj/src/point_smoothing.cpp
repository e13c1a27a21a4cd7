#include "quadkit/point_smoothing.hpp"

#include <cmath>
#include <string>

#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

Eigen::MatrixXd smooth_pass(const KnnGraph& g, const Eigen::MatrixXd& z, double step) {
  Eigen::MatrixXd out = z;
  for (int i = 0; i < static_cast<int>(g.neighbors.size()); ++i) {
    Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(z.cols());
    for (size_t k = 0; k < g.neighbors[i].size(); ++k) {
      avg += g.weights[i][k] * (z.row(g.neighbors[i][k]) - z.row(i));
    }
    out.row(i) += step * avg;
  }
  return out;
}

}  // namespace

KnnGraph knn_graph(std::span<const Vec3> points, std::span<const Vec3> normals,
                   const TaubinOptions& options) {
  const int n = static_cast<int>(points.size());
  const int K = options.neighbors;
  if (n < K + 1) {
    throw InputError("point smoothing needs at least " + std::to_string(K + 1) + " points, got " +
                     std::to_string(n));
  }
  const PointIndex index(std::vector<Vec3>(points.begin(), points.end()));
  KnnGraph g;
  g.neighbors.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    auto nb = index.knn(points[i], K, i);
    nb.resize(K);
    double sigma = std::numeric_limits<double>::infinity();
    for (int j : nb) sigma = std::min(sigma, (points[j] - points[i]).norm());
    if (!(sigma > 0)) {
      throw InputError("point smoothing: duplicate point at index " + std::to_string(i));
    }
    std::vector<double> w;
    double total = 0;
    for (int j : nb) {
      double d = (points[j] - points[i]).squaredNorm();
      if (!normals.empty()) d += options.normal_weight * (normals[j] - normals[i]).squaredNorm();
      w.push_back(std::exp(-d / (options.bandwidth * sigma * sigma)));
      total += w.back();
    }
    for (auto& x : w) x /= total;
    g.neighbors[i] = std::move(nb);
    g.weights[i] = std::move(w);
  }
  return g;
}

Eigen::MatrixXd apply_taubin(const KnnGraph& graph, const Eigen::MatrixXd& signal,
                             const TaubinOptions& options) {
  Eigen::MatrixXd z = signal;
  for (int it = 0; it < options.iterations; ++it) {
    z = smooth_pass(graph, z, options.lambda);
    z = smooth_pass(graph, z, options.mu);
  }
  return z;
}

Eigen::MatrixXd regularize_point_signal(std::span<const Vec3> points, std::span<const Vec3> normals,
                                        const Eigen::MatrixXd& signal,
                                        const TaubinOptions& options) {
  if (signal.rows() != static_cast<Eigen::Index>(points.size())) {
    throw InputError("point smoothing: signal rows must match the point count");
  }
  if (!normals.empty() && normals.size() != points.size()) {
    throw InputError("point smoothing: normal count must match the point count");
  }
  return apply_taubin(knn_graph(points, normals, options), signal, options);
}

double dirichlet_energy(const KnnGraph& graph, const Eigen::MatrixXd& signal) {
  double e = 0;
  for (size_t i = 0; i < graph.neighbors.size(); ++i) {
    for (size_t k = 0; k < graph.neighbors[i].size(); ++k) {
      e += graph.weights[i][k] * (signal.row(graph.neighbors[i][k]) - signal.row(i)).squaredNorm();
    }
  }
  return e;
}

}  // namespace quadkit
