#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "quadkit/point_smoothing.hpp"
#include "quadkit/shapes.hpp"
#include "support.hpp"

using namespace quadkit;

namespace {

std::vector<Vec3> jittered_grid(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  std::vector<Vec3> pts;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) pts.emplace_back(i + U(rng), j + U(rng), 0.1 * U(rng));
  }
  return pts;
}

std::vector<Vec3> wavy_normals(const std::vector<Vec3>& pts) {
  std::vector<Vec3> n;
  for (const auto& p : pts) n.push_back(Vec3(std::sin(p.x()), 0.3, 1.0).normalized());
  return n;
}

// Dense (I + mu L)(I + lambda L) with L = D^-1 W - I over brute-force K nearest neighbours.
Eigen::MatrixXd dense_taubin(const std::vector<Vec3>& p, const std::vector<Vec3>& n,
                             const TaubinOptions& o) {
  const int N = static_cast<int>(p.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < N; ++j) {
      if (j != i) d.emplace_back((p[j] - p[i]).squaredNorm(), j);
    }
    std::sort(d.begin(), d.end());
    const double sigma2 = d[0].first;
    for (int k = 0; k < o.neighbors; ++k) {
      const int j = d[k].second;
      const double e = d[k].first + o.normal_weight * (n[j] - n[i]).squaredNorm();
      W(i, j) = std::exp(-e / (o.bandwidth * sigma2));
    }
  }
  const Eigen::VectorXd deg = W.rowwise().sum();
  const Eigen::MatrixXd L = deg.cwiseInverse().asDiagonal() * W - Eigen::MatrixXd::Identity(N, N);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  return (I + o.mu * L) * (I + o.lambda * L);
}

}  // namespace

TEST_CASE("taubin leaves a constant signal unchanged") {
  const auto pts = jittered_grid(12, 1);
  const auto nrm = wavy_normals(pts);
  Eigen::MatrixXd z(pts.size(), 3);
  z.rowwise() = Eigen::RowVector3d(0.7, -2.5, 11.0);
  const auto out = regularize_point_signal(pts, nrm, z);
  CHECK((out - z).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("taubin is affine in the signal") {
  const auto pts = jittered_grid(10, 2);
  const auto nrm = wavy_normals(pts);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> G;
  Eigen::MatrixXd x(pts.size(), 2);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = G(rng);
  const KnnGraph g = knn_graph(pts, nrm);
  const double a = -1.7, c = 4.2;
  const Eigen::MatrixXd lhs = apply_taubin(g, (a * x).array() + c);
  const Eigen::MatrixXd rhs = (a * apply_taubin(g, x)).array() + c;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("taubin equals the dense operator and lowers noise energy") {
  const auto pts = jittered_grid(25, 4);  // 625 points
  const auto nrm = wavy_normals(pts);
  TaubinOptions o;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> G;
  Eigen::MatrixXd x(pts.size(), 4);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = G(rng);
  const Eigen::MatrixXd A = dense_taubin(pts, nrm, o);
  Eigen::MatrixXd want = x;
  for (int k = 0; k < o.iterations; ++k) want = A * want;
  const Eigen::MatrixXd got = regularize_point_signal(pts, nrm, x, o);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
  const KnnGraph g = knn_graph(pts, nrm, o);
  CHECK(dirichlet_energy(g, got) < dirichlet_energy(g, x));
}

TEST_CASE("taubin rejects duplicates and tiny inputs") {
  auto pts = jittered_grid(8, 6);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(pts.size(), 1);
  pts[5] = pts[17];
  CHECK_THROWS_AS(regularize_point_signal(pts, {}, z), InputError);
  const auto few = jittered_grid(5, 7);
  CHECK_THROWS_AS(regularize_point_signal(few, {}, Eigen::MatrixXd::Zero(25, 1)), InputError);
}
