#include "quadkit/loop_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

template <typename T>
int repeats(const std::vector<T>& items) {
  std::vector<T> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  return static_cast<int>(items.size()) - static_cast<int>(distinct);
}

LoopMeasure finish(int si, double ind) {
  LoopMeasure m;
  m.self_intersections = si;
  m.rotation_index = ind;
  m.is_simple = si == 0 && ind <= 1.0 + kRotationTolerance;
  return m;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 1.0; }

}  // namespace

int self_intersection_count(const FaceLoop& loop) { return repeats(loop.faces); }

int self_intersection_count(const EdgeLoop& loop) { return repeats(loop.vertices); }

double rotation_index(std::span<const Vec3> polyline, bool closed, RotationMode mode) {
  if (polyline.size() < 3) return 0.0;
  Vec3 mean = Vec3::Zero();
  for (const auto& p : polyline) mean += p;
  mean /= static_cast<double>(polyline.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : polyline) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d ev = eig.eigenvalues().cwiseMax(0.0);  // ascending
  if (ev(2) <= 0.0 || std::sqrt(ev(1)) <= 1e-9 * std::sqrt(ev(2))) return 0.0;
  const Vec3 ax = eig.eigenvectors().col(2);
  const Vec3 ay = eig.eigenvectors().col(1);

  std::vector<Vec2> pts;
  const double scale = std::sqrt(ev(2));
  for (const auto& p : polyline) {
    const Vec2 q((p - mean).dot(ax), (p - mean).dot(ay));
    if (pts.empty() || (q - pts.back()).norm() > 1e-12 * scale) pts.push_back(q);
  }
  if (closed && pts.size() > 1 && (pts.front() - pts.back()).norm() <= 1e-12 * scale) pts.pop_back();
  const size_t n = pts.size();
  if (n < 3) return 0.0;

  double signed_sum = 0.0;
  double abs_sum = 0.0;
  auto turn = [&](size_t a, size_t b, size_t c) {
    const Vec2 d0 = pts[b] - pts[a];
    const Vec2 d1 = pts[c] - pts[b];
    const double t = std::atan2(cross2(d0, d1), d0.dot(d1));
    signed_sum += t;
    abs_sum += std::abs(t);
  };
  if (closed) {
    for (size_t i = 0; i < n; ++i) turn((i + n - 1) % n, i, (i + 1) % n);
  } else {
    for (size_t i = 1; i + 1 < n; ++i) turn(i - 1, i, i + 1);
  }
  const double total = mode == RotationMode::Signed ? std::abs(signed_sum) : abs_sum;
  return total / (2.0 * kPi);
}

std::vector<Vec3> loop_polyline(const Mesh& mesh, const FaceLoop& loop) {
  std::vector<Vec3> out;
  out.reserve(loop.faces.size());
  for (int f : loop.faces) out.push_back(mesh.face_center(f));
  return out;
}

std::vector<Vec3> loop_polyline(const Mesh& mesh, const EdgeLoop& loop) {
  std::vector<Vec3> out;
  out.reserve(loop.vertices.size());
  for (int v : loop.vertices) out.push_back(mesh.position(v));
  return out;
}

LoopMeasure measure_loop(const Mesh& mesh, const FaceLoop& loop, RotationMode mode) {
  const auto poly = loop_polyline(mesh, loop);
  return finish(self_intersection_count(loop), rotation_index(poly, loop.closed, mode));
}

LoopMeasure measure_loop(const Mesh& mesh, const EdgeLoop& loop, RotationMode mode) {
  const auto poly = loop_polyline(mesh, loop);
  return finish(self_intersection_count(loop), rotation_index(poly, loop.closed, mode));
}

SimplicityReport loop_simplicity(const Mesh& mesh, const BaseComplex* complex, RotationMode mode) {
  SimplicityReport rep;
  rep.pure_quad = mesh.is_pure_quad();
  if (complex) rep.N_c = complex->num_charts();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_halfedge(v) < 0 || is_regular_vertex(mesh, v)) continue;
    ++rep.N_I_all;
    if (!(mesh.is_boundary_vertex(v) && mesh.valence(v) == 2)) ++rep.N_I;
  }

  std::vector<double> area(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) area[f] = mesh.face_area(f);

  double simple_area = 0.0, total_area = 0.0;
  for (auto& loop : all_face_loops(mesh)) {
    if (loop.faces.empty()) continue;
    const auto m = measure_loop(mesh, loop, mode);
    double a = 0.0;
    for (int f : loop.faces) a += area[f];
    total_area += a;
    if (m.is_simple) simple_area += a;
    rep.face_loop_measures.push_back(m);
    rep.face_loops.push_back(std::move(loop));
  }
  rep.S_fl = ratio(simple_area, total_area);

  simple_area = 0.0;
  total_area = 0.0;
  for (auto& loop : all_edge_loops(mesh)) {
    const auto m = measure_loop(mesh, loop, mode);
    double a = 0.0;
    for (int e : loop.edges) {
      for (int s = 0; s < 2; ++s) {
        const int f = mesh.face(Mesh::halfedge(e, s));
        if (f >= 0 && mesh.face_degree(f) == 4) a += area[f];
      }
    }
    total_area += a;
    if (m.is_simple) simple_area += a;
    rep.edge_loop_measures.push_back(m);
    rep.edge_loops.push_back(std::move(loop));
  }
  rep.S_el = ratio(simple_area, total_area);
  rep.S_l = std::min(rep.S_fl, rep.S_el);
  return rep;
}

JacobianStats scaled_jacobian(const Mesh& mesh) {
  JacobianStats st;
  st.per_face.assign(mesh.num_faces(), 1.0);
  double weighted = 0.0, total = 0.0;
  st.min = mesh.num_faces() > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto vs = mesh.face_vertices(f);
    const int k = static_cast<int>(vs.size());
    const Vec3 n = mesh.face_normal(f);
    double q = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const Vec3& p = mesh.position(vs[i]);
      const Vec3 a = mesh.position(vs[(i + 1) % k]) - p;
      const Vec3 b = mesh.position(vs[(i + k - 1) % k]) - p;
      if (a.norm() == 0.0 || b.norm() == 0.0) {
        q = -1.0;
        st.flagged.push_back(f);
        break;
      }
      q = std::min(q, a.normalized().cross(b.normalized()).dot(n));
    }
    st.per_face[f] = q;
    st.min = std::min(st.min, q);
    const double w = mesh.face_area(f);
    weighted += w * q;
    total += w;
  }
  st.mean = total > 0.0 ? weighted / total : st.min;
  return st;
}

std::vector<Vec3> sample_surface(const Mesh& mesh, int count, std::mt19937_64& rng) {
  std::vector<int> owner;
  const auto tris = mesh_triangles(mesh, &owner);
  std::vector<double> cumulative;
  cumulative.reserve(tris.size());
  double acc = 0.0;
  for (const auto& t : tris) {
    acc += triangle_area(t[0], t[1], t[2]);
    cumulative.push_back(acc);
  }
  std::vector<Vec3> out;
  if (tris.empty() || acc <= 0.0) return out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double r = unit(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const size_t t = std::min<size_t>(it - cumulative.begin(), tris.size() - 1);
    double u = unit(rng), v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& tri = tris[t];
    out.push_back(tri[0] + u * (tri[1] - tri[0]) + v * (tri[2] - tri[0]));
  }
  return out;
}

double one_sided_hausdorff(const Mesh& from, const Mesh& to, double diagonal, int samples,
                           uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto points = sample_surface(from, samples, rng);
  points.insert(points.end(), from.positions().begin(), from.positions().end());
  const TriangleIndex index(mesh_triangles(to));
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, index.closest(p).distance_sq);
  return diagonal > 0.0 ? 100.0 * std::sqrt(worst) / diagonal : 0.0;
}

double hausdorff(const Mesh& a, const Mesh& b, int samples, uint64_t seed) {
  const double diag = a.bbox().diagonal();
  return std::max(one_sided_hausdorff(a, b, diag, samples, seed),
                  one_sided_hausdorff(b, a, diag, samples, seed + 1));
}

}  // namespace quadkit
