#include "quadkit/curation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "quadkit/loops.hpp"
#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

std::vector<double> vertex_weights(const Mesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double share = mesh.face_area(f) / mesh.face_degree(f);
    for (int v : mesh.face_vertices(f)) w[v] += share;
  }
  double total = 0.0;
  for (double x : w) total += x;
  // Without area (e.g. a point cloud of faces collapsed flat) every vertex counts the same.
  if (total <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

double mean_surface_distance(const std::vector<Vec3>& points, const TriangleIndex& index) {
  if (points.empty() || index.size() == 0) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& p : points) sum += std::sqrt(index.closest(p).distance_sq);
  return sum / points.size();
}

}  // namespace

Mesh normalize(const Mesh& mesh) {
  const auto& pos = mesh.positions();
  if (pos.empty() || mesh.bbox().diagonal() <= 0.0) throw InputError("normalize: all vertices coincide");
  const auto w = vertex_weights(mesh);
  double total = 0.0;
  Vec3 mean = Vec3::Zero();
  for (size_t i = 0; i < pos.size(); ++i) {
    mean += w[i] * pos[i];
    total += w[i];
  }
  mean /= total;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < pos.size(); ++i) {
    const Vec3 d = pos[i] - mean;
    cov += w[i] * d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov / total);
  // Eigenvalues ascend; the largest axis goes to x.
  Eigen::Matrix3d axes;
  for (int k = 0; k < 3; ++k) axes.row(k) = eig.eigenvectors().col(2 - k).transpose();

  std::vector<Vec3> out(pos.size());
  for (size_t i = 0; i < pos.size(); ++i) out[i] = axes * (pos[i] - mean);
  for (int k = 0; k < 3; ++k) {
    double skew = 0.0;
    for (size_t i = 0; i < pos.size(); ++i) skew += w[i] * out[i][k] * out[i][k] * out[i][k];
    if (skew < 0.0) {
      axes.row(k) *= -1.0;
      for (auto& p : out) p[k] = -p[k];
    }
  }
  const BBox box = bounding_box(out);
  const Vec3 center = box.center();
  const double extent = (box.hi - box.lo).maxCoeff();
  const double scale = 2.0 / extent;
  for (auto& p : out) p = (p - center) * scale;

  auto faces = mesh.face_polygons();
  if (axes.determinant() < 0.0) {
    for (auto& f : faces) std::reverse(f.begin(), f.end());
  }
  BuildOptions opts;
  opts.degenerate_area = -1;
  Mesh result = Mesh::from_polygons(std::move(out), std::move(faces), opts);
  if (mesh.num_edges() > 0) {
    // Carry feature tags over by endpoint pairs.
    std::vector<bool> flags(result.num_edges(), false);
    bool any = false;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (!mesh.is_feature_edge(e)) continue;
      const int h = Mesh::halfedge(e, 0);
      const int r = result.find_edge(mesh.tail(h), mesh.head(h));
      if (r >= 0) flags[r] = any = true;
    }
    if (any) result.set_feature_edges(flags);
  }
  return result;
}

double quad_non_planarity(const Mesh& mesh, int f) {
  const auto vs = mesh.face_vertices(f);
  if (vs.size() != 4) return 0.0;
  std::array<Vec3, 4> p;
  for (int i = 0; i < 4; ++i) p[i] = mesh.position(vs[i]);
  double mean_edge = 0.0;
  for (int i = 0; i < 4; ++i) mean_edge += (p[(i + 1) % 4] - p[i]).norm() / 4.0;
  if (mean_edge <= 0.0) return 0.0;
  Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]);
  if (n.norm() <= 1e-12 * mean_edge * mean_edge) n = newell_normal(p);
  if (n.norm() <= 0.0) return 0.0;
  return std::abs((p[3] - p[0]).dot(n.normalized())) / mean_edge;
}

CurationMeasures measure_for_curation(const Mesh& mesh, const BaseComplex& complex,
                                      const SimplicityReport& report) {
  CurationMeasures m;
  m.S_l = report.S_l;
  m.N_c = complex.num_charts();
  m.boundaries = static_cast<int>(mesh.boundary_loops().size());
  for (const auto& iv : irregular_vertices(mesh)) {
    if (!iv.boundary) ++m.interior_singularities;
  }
  for (int f = 0; f < mesh.num_faces(); ++f) m.max_non_planarity = std::max(m.max_non_planarity, quad_non_planarity(mesh, f));

  double min_area = std::numeric_limits<double>::infinity();
  double min_side = std::numeric_limits<double>::infinity();
  for (const auto& chart : complex.charts) {
    double area = 0.0;
    for (int f : chart.faces) area += mesh.face_area(f);
    min_area = std::min(min_area, area);
    for (const auto& side : chart.sides) {
      double length = 0.0;
      for (size_t i = 0; i + 1 < side.size(); ++i) length += (mesh.position(side[i + 1]) - mesh.position(side[i])).norm();
      min_side = std::min(min_side, length);
    }
  }
  m.min_chart_area = complex.charts.empty() ? 0.0 : min_area;
  m.min_chart_side = complex.charts.empty() ? 0.0 : min_side;
  return m;
}

CurationVerdict judge(const CurationMeasures& m, const CurationThresholds& t) {
  CurationVerdict v;
  v.measured = m;
  auto check = [&](const char* name, bool pass, double value, double threshold) {
    v.checks.push_back({name, pass, value, threshold});
    if (!pass && v.keep) {
      v.keep = false;
      v.reason = name;
    }
  };
  check("simplicity", m.S_l >= t.min_simplicity, m.S_l, t.min_simplicity);
  check("planarity", m.max_non_planarity <= t.max_non_planarity, m.max_non_planarity, t.max_non_planarity);
  check("chart-count", m.N_c <= t.max_charts, m.N_c, t.max_charts);
  check("chart-area", m.min_chart_area >= t.min_chart_area, m.min_chart_area, t.min_chart_area);
  check("chart-side", m.min_chart_side >= t.min_chart_side, m.min_chart_side, t.min_chart_side);
  check("boundaries", m.boundaries <= t.max_boundaries, m.boundaries, t.max_boundaries);
  // Closed meshes pass trivially; open ones need an interior singularity.
  check("trivial-layout", m.boundaries == 0 || m.interior_singularities >= 1, m.interior_singularities, 1);
  return v;
}

CurationVerdict filter_mesh(const Mesh& mesh, const BaseComplex& complex, const SimplicityReport& report,
                            const CurationThresholds& thresholds) {
  return judge(measure_for_curation(mesh, complex, report), thresholds);
}

ConnectivityFingerprint fingerprint(const Mesh& mesh, const BaseComplex& complex) {
  ConnectivityFingerprint fp;
  std::map<int, int> hist;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_halfedge(v) >= 0) ++hist[mesh.valence(v)];
  }
  fp.valences.assign(hist.begin(), hist.end());
  fp.faces = mesh.num_faces();
  fp.irregular = count_reported_irregular(irregular_vertices(mesh));
  for (const auto& c : complex.charts) fp.chart_sizes.emplace_back(std::min(c.m, c.n), std::max(c.m, c.n));
  std::sort(fp.chart_sizes.begin(), fp.chart_sizes.end());
  return fp;
}

double chamfer_distance(const Mesh& a, const Mesh& b, int samples, uint64_t seed) {
  std::mt19937_64 rng_a(seed), rng_b(seed + 1);
  const auto pa = sample_surface(a, samples, rng_a);
  const auto pb = sample_surface(b, samples, rng_b);
  const TriangleIndex ia(mesh_triangles(a)), ib(mesh_triangles(b));
  return 0.5 * (mean_surface_distance(pa, ib) + mean_surface_distance(pb, ia));
}

std::vector<int> dedup(const std::vector<DedupItem>& items, const DedupOptions& options) {
  std::vector<int> order(items.size());
  for (size_t i = 0; i < items.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return items[x].id < items[y].id; });

  std::vector<int> duplicate_of(items.size(), -1);
  std::map<ConnectivityFingerprint, std::vector<int>> kept;
  for (int i : order) {
    auto& bucket = kept[items[i].print];
    for (int r : bucket) {
      if (chamfer_distance(*items[r].mesh, *items[i].mesh, options.samples, options.seed) < options.tolerance) {
        duplicate_of[i] = items[r].id;
        break;
      }
    }
    if (duplicate_of[i] < 0) bucket.push_back(i);
  }
  return duplicate_of;
}

}  // namespace quadkit
