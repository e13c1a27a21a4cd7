#include "quadkit/chart_fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "quadkit/loop_metrics.hpp"

namespace quadkit {
namespace {

constexpr double kSmoothTolerance = 1e-7;

Vec3 bilinear(const std::array<Vec3, 4>& q, double u, double v) {
  return (1 - u) * (1 - v) * q[0] + u * (1 - v) * q[1] + u * v * q[2] + (1 - u) * v * q[3];
}

// Corners of triangle 0 (q00 q10 q11) or 1 (q00 q11 q01).
std::array<Vec3, 3> cell_triangle(const std::array<Vec3, 4>& q, int t) {
  if (t == 0) return {q[0], q[1], q[2]};
  return {q[0], q[2], q[3]};
}

// Edge-direction parameters (tx, ty) in [0,1]^2 of a point on one triangle, plus their
// gradients as surface vectors and the in-plane distance to the nearest triangle side.
struct TriangleEval {
  double tx = 0;
  double ty = 0;
  Vec3 grad_tx = Vec3::Zero();
  Vec3 grad_ty = Vec3::Zero();
  double edge_distance = 0;
  Vec3 normal = Vec3::Zero();
};

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

TriangleEval eval_triangle(const std::array<Vec3, 4>& q, int t, const Vec3& p) {
  TriangleEval out;
  const auto tri = cell_triangle(q, t);
  const PlaneFrame frame = PlaneFrame::of_triangle(tri[0], tri[1], tri[2]);
  const Vec2 pp = frame.flatten(p);
  const Vec2 q00 = frame.flatten(q[0]);
  const Vec2 q11 = frame.flatten(q[2]);
  Vec2 gx, gy;
  if (t == 0) {
    const Vec2 q10 = frame.flatten(q[1]);
    const Vec2 up = perp(q11 - q10);
    const Vec2 along = perp(q10 - q00);
    gx = up / (q10 - q00).dot(up);
    gy = along / (q11 - q10).dot(along);
    out.tx = (pp - q00).dot(gx);
    out.ty = (pp - q10).dot(gy);
    out.edge_distance = std::min({segment_distance(pp, q00, q10), segment_distance(pp, q10, q11),
                                  segment_distance(pp, q00, q11)});
  } else {
    const Vec2 q01 = frame.flatten(q[3]);
    const Vec2 up = perp(q01 - q00);
    const Vec2 along = perp(q11 - q01);
    gx = up / (q11 - q01).dot(up);
    gy = along / (q01 - q00).dot(along);
    out.tx = (pp - q01).dot(gx);
    out.ty = (pp - q00).dot(gy);
    out.edge_distance = std::min({segment_distance(pp, q00, q11), segment_distance(pp, q11, q01),
                                  segment_distance(pp, q01, q00)});
  }
  out.grad_tx = frame.lift_direction(gx);
  out.grad_ty = frame.lift_direction(gy);
  out.normal = frame.n;
  return out;
}

double quad_scale(const std::array<Vec3, 4>& q) {
  double s = 0;
  for (int i = 0; i < 4; ++i) s += (q[(i + 1) % 4] - q[i]).norm();
  return s / 4;
}

Vec3 tangent_unit(const Vec3& g, const Vec3& normal) {
  Vec3 t = g;
  if (normal.squaredNorm() > 0) {
    const Vec3 n = normal.normalized();
    t -= t.dot(n) * n;
  }
  const double len = t.norm();
  return len > 0 ? Vec3(t / len) : Vec3::Zero();
}

struct Located {
  SubchartPoint at;
  TriangleEval tri;
};

Located locate_full(const ChartSplit& split, const Vec3& p, const TriangleIndex& index) {
  const auto hit = index.closest(p);
  Located out;
  out.at.cell = hit.triangle / 2;
  out.at.triangle = hit.triangle % 2;
  out.at.point = hit.point;
  out.at.distance = std::sqrt(hit.distance_sq);
  const auto& cell = split.cells[out.at.cell];
  out.at.projected = out.at.distance > 1e-9 * quad_scale(cell.corners);
  out.tri = eval_triangle(cell.corners, out.at.triangle, hit.point);
  const double tx = std::clamp(out.tri.tx, 0.0, 1.0);
  const double ty = std::clamp(out.tri.ty, 0.0, 1.0);
  out.at.px = std::clamp(cell.a0 + tx * (cell.a1 - cell.a0), 0.0, 1.0);
  out.at.py = std::clamp(cell.b0 + ty * (cell.b1 - cell.b0), 0.0, 1.0);
  return out;
}

// Unit coordinate of grid node k along an axis with cumulative lengths `xs`.
double node_coord(const std::vector<double>& xs, int k) {
  const int m = static_cast<int>(xs.size()) - 1;
  if (k == 0 || k == m) return 1.0;
  const double mid = xs.back() / 2;
  return std::min(1.0, std::abs(xs[k] - mid) / mid);
}

// The column (or row) holding the midpoint and the fraction inside it. The fraction is 0 when
// the midpoint falls on a grid line, which is then the column's left side.
std::pair<int, double> locate_mid(const std::vector<double>& xs) {
  const int m = static_cast<int>(xs.size()) - 1;
  const double mid = xs.back() / 2;
  const double tol = 1e-12 * xs.back();
  for (int k = 1; k < m; ++k) {
    if (std::abs(xs[k] - mid) <= tol) return {k, 0.0};
  }
  for (int k = 0; k < m; ++k) {
    if (xs[k] < mid && mid < xs[k + 1]) return {k, (mid - xs[k]) / (xs[k + 1] - xs[k])};
  }
  return {0, 0.5};
}

}  // namespace

CellCoords subchart_coords(const Vec3& p, const std::array<Vec3, 4>& quad, double a0, double a1,
                           double b0, double b1) {
  CellCoords out;
  const auto t0 = cell_triangle(quad, 0);
  const auto t1 = cell_triangle(quad, 1);
  const auto c0 = closest_point_on_triangle(p, t0[0], t0[1], t0[2]);
  const auto c1 = closest_point_on_triangle(p, t1[0], t1[1], t1[2]);
  out.triangle = c0.distance_sq <= c1.distance_sq ? 0 : 1;
  const auto& c = out.triangle == 0 ? c0 : c1;
  const double scale = quad_scale(quad);
  out.flagged = std::sqrt(c.distance_sq) > 1e-9 * scale;
  const auto ev = eval_triangle(quad, out.triangle, c.point);
  out.px = a0 + ev.tx * (a1 - a0);
  out.py = b0 + ev.ty * (b1 - b0);
  return out;
}

void ChartSplit::build_index() {
  std::vector<std::array<Vec3, 3>> tris;
  tris.reserve(2 * cells.size());
  for (const auto& c : cells) {
    tris.push_back(cell_triangle(c.corners, 0));
    tris.push_back(cell_triangle(c.corners, 1));
  }
  index_ = TriangleIndex(std::move(tris));
}

SubchartPoint ChartSplit::locate(const Vec3& p) const { return locate_full(*this, p, index_).at; }

double ChartSplit::cell_scale(int cell) const { return quad_scale(cells[cell].corners); }

Vec3 ChartSplit::point_at(int subchart, double px, double py) const {
  const auto& sc = subcharts[subchart];
  constexpr double tol = 1e-12;
  int best = -1;
  double best_excess = std::numeric_limits<double>::infinity();
  for (int id : sc.cells) {
    const auto& c = cells[id];
    const double ex = std::max({std::min(c.a0, c.a1) - px, px - std::max(c.a0, c.a1),
                                std::min(c.b0, c.b1) - py, py - std::max(c.b0, c.b1)});
    if (ex < best_excess) {
      best_excess = ex;
      best = id;
    }
    if (ex <= tol) break;
  }
  const auto& c = cells[best];
  const double tx = c.a1 == c.a0 ? 0.0 : std::clamp((px - c.a0) / (c.a1 - c.a0), 0.0, 1.0);
  const double ty = c.b1 == c.b0 ? 0.0 : std::clamp((py - c.b0) / (c.b1 - c.b0), 0.0, 1.0);
  const auto& q = c.corners;
  if (tx >= ty) return q[0] + tx * (q[1] - q[0]) + ty * (q[2] - q[1]);
  return q[0] + ty * (q[3] - q[0]) + tx * (q[2] - q[3]);
}

ChartSplit split_charts(const Mesh& mesh, const BaseComplex& complex,
                        const std::vector<double>& lengths) {
  ChartSplit split;
  split.ring_length = lengths;
  split.diagonal = mesh.bbox().diagonal();
  split.face_cells.assign(mesh.num_faces(), {});
  std::map<int, int> dual_of_vertex;

  for (int ci = 0; ci < complex.num_charts(); ++ci) {
    const Chart& ch = complex.charts[ci];
    if (ch.m <= 0 || ch.n <= 0) throw Error("split_charts: empty chart");
    ChartFrame frame;
    frame.xs.assign(ch.m + 1, 0.0);
    frame.ys.assign(ch.n + 1, 0.0);
    for (int i = 0; i < ch.m; ++i) {
      frame.xs[i + 1] = frame.xs[i] + lengths[Mesh::edge(ch.cell_bottom[i])];
    }
    for (int j = 0; j < ch.n; ++j) {
      frame.ys[j + 1] = frame.ys[j] + lengths[Mesh::edge(mesh.next(ch.cell_bottom[j * ch.m]))];
    }
    const auto [mid_col, sx] = locate_mid(frame.xs);
    const auto [mid_row, sy] = locate_mid(frame.ys);

    for (int q = 0; q < 4; ++q) {
      Subchart sc;
      sc.chart = ci;
      sc.quadrant = q;
      const int v = ch.corners[q];
      auto [it, inserted] = dual_of_vertex.emplace(v, static_cast<int>(split.duals.size()));
      if (inserted) split.duals.push_back({v, mesh.position(v), {}});
      sc.dual = it->second;
      split.duals[sc.dual].subcharts.push_back(static_cast<int>(split.subcharts.size()));
      frame.subcharts[q] = static_cast<int>(split.subcharts.size());
      split.subcharts.push_back(std::move(sc));
    }

    auto quad_of = [&](int i, int j) {
      const int h = ch.cell_bottom[j * ch.m + i];
      return std::array<Vec3, 4>{mesh.position(mesh.tail(h)), mesh.position(mesh.head(h)),
                                 mesh.position(mesh.head(mesh.next(h))),
                                 mesh.position(mesh.head(mesh.next(mesh.next(h))))};
    };
    // Breakpoints of a column/row with their unit coordinate and side of the midpoint.
    struct Break {
      double t;
      double coord;
    };
    auto breaks = [](const std::vector<double>& xs, int k, int mid, double s) {
      std::vector<Break> out{{0.0, node_coord(xs, k)}};
      if (k == mid && s > 0) out.push_back({s, 0.0});
      out.push_back({1.0, node_coord(xs, k + 1)});
      return out;
    };
    const double half_w = frame.width() / 2;
    const double half_h = frame.height() / 2;
    std::array<int, 4> span_x{}, span_y{};

    for (int j = 0; j < ch.n; ++j) {
      const auto yb = breaks(frame.ys, j, mid_row, sy);
      for (int i = 0; i < ch.m; ++i) {
        const auto xb = breaks(frame.xs, i, mid_col, sx);
        const int face = ch.cell_face[j * ch.m + i];
        const auto q = quad_of(i, j);
        for (size_t bj = 0; bj + 1 < yb.size(); ++bj) {
          for (size_t bi = 0; bi + 1 < xb.size(); ++bi) {
            SubchartCell cell;
            cell.face = face;
            const double u0 = xb[bi].t, u1 = xb[bi + 1].t;
            const double v0 = yb[bj].t, v1 = yb[bj + 1].t;
            cell.corners = {bilinear(q, u0, v0), bilinear(q, u1, v0), bilinear(q, u1, v1),
                            bilinear(q, u0, v1)};
            cell.a0 = xb[bi].coord;
            cell.a1 = xb[bi + 1].coord;
            cell.b0 = yb[bj].coord;
            cell.b1 = yb[bj + 1].coord;
            const double xc = frame.xs[i] + 0.5 * (u0 + u1) * (frame.xs[i + 1] - frame.xs[i]);
            const double yc = frame.ys[j] + 0.5 * (v0 + v1) * (frame.ys[j + 1] - frame.ys[j]);
            const bool high_x = xc > half_w;
            const bool high_y = yc > half_h;
            const int quadrant = high_y ? (high_x ? 2 : 3) : (high_x ? 1 : 0);
            cell.subchart = frame.subcharts[quadrant];
            const int id = static_cast<int>(split.cells.size());
            split.subcharts[cell.subchart].cells.push_back(id);
            split.face_cells[face].push_back(id);
            split.cells.push_back(cell);
            if (j == 0 && bj == 0) ++span_x[quadrant];
            if (i == 0 && bi == 0) ++span_y[quadrant];
          }
        }
      }
    }
    // Row 0 only reaches the low-y quadrants and column 0 the low-x ones; mirror the rest.
    for (int q = 0; q < 4; ++q) {
      auto& sc = split.subcharts[frame.subcharts[q]];
      sc.nx = std::max(span_x[q], span_x[q ^ 3]);
      sc.ny = std::max(span_y[q], span_y[q ^ 1]);
    }

    auto point_at_metric = [&](double x, double y) {
      int i = static_cast<int>(std::upper_bound(frame.xs.begin(), frame.xs.end(), x) - frame.xs.begin()) - 1;
      int j = static_cast<int>(std::upper_bound(frame.ys.begin(), frame.ys.end(), y) - frame.ys.begin()) - 1;
      i = std::clamp(i, 0, ch.m - 1);
      j = std::clamp(j, 0, ch.n - 1);
      const double u = std::clamp((x - frame.xs[i]) / (frame.xs[i + 1] - frame.xs[i]), 0.0, 1.0);
      const double v = std::clamp((y - frame.ys[j]) / (frame.ys[j + 1] - frame.ys[j]), 0.0, 1.0);
      return bilinear(quad_of(i, j), u, v);
    };
    frame.center = point_at_metric(half_w, half_h);
    std::vector<double> ys = frame.ys, xs = frame.xs;
    ys.push_back(half_h);
    xs.push_back(half_w);
    std::sort(ys.begin(), ys.end());
    std::sort(xs.begin(), xs.end());
    for (double y : ys) frame.flow_x.push_back(point_at_metric(half_w, y));
    for (double x : xs) frame.flow_y.push_back(point_at_metric(x, half_h));
    split.charts.push_back(std::move(frame));
  }
  split.build_index();
  return split;
}

ChartSplit split_quad_mesh(const Mesh& mesh) {
  const BaseComplex complex = build_base_complex_with_features(mesh);
  return split_charts(mesh, complex, assign_ring_lengths(mesh));
}

double eval_cdf(const ChartSplit& split, const Vec3& p) {
  const auto at = split.locate(p);
  return cdf_value(at.px, at.py);
}

double eval_dcdf(const ChartSplit& split, const Vec3& p) {
  const auto at = split.locate(p);
  return dcdf_value(at.px, at.py);
}

Densified densify(double cdf, double dcdf, int N) {
  if (N < 1) throw Error("densify: N must be at least 1");
  const double u = 1.0 - cdf;
  const double v = dcdf;
  auto center_gap = [N](double x) { return std::abs(x - (std::floor(N * x) + 0.5) / N); };
  auto lattice_gap = [N](double x) { return std::abs(N * x - std::floor(N * x + 0.5)); };
  return {1.0 - 2.0 * N * std::max(center_gap(u), center_gap(v)),
          1.0 - 2.0 * std::max(lattice_gap(u), lattice_gap(v))};
}

namespace {

// Value and gradient of one field branch: 1 - scale * max(|x - cx|, |y - cy|).
struct Peak {
  double value = 0;
  Vec3 grad = Vec3::Zero();
  bool tie = false;
};

Peak peak(double x, double y, double cx, double cy, double scale, const Vec3& gx, const Vec3& gy) {
  const double dx = x - cx;
  const double dy = y - cy;
  Peak out;
  out.value = 1.0 - scale * std::max(std::abs(dx), std::abs(dy));
  out.tie = std::abs(std::abs(dx) - std::abs(dy)) < kSmoothTolerance;
  if (std::abs(dx) >= std::abs(dy)) {
    out.grad = -scale * (dx >= 0 ? 1.0 : -1.0) * gx;
    out.tie = out.tie || std::abs(dx) < kSmoothTolerance;
  } else {
    out.grad = -scale * (dy >= 0 ? 1.0 : -1.0) * gy;
    out.tie = out.tie || std::abs(dy) < kSmoothTolerance;
  }
  return out;
}

}  // namespace

FieldGradients field_gradients(const ChartSplit& split, const Vec3& p) {
  const Vec3 zero = Vec3::Zero();
  const auto s = sample_field(split, p, zero);
  FieldGradients g;
  g.cdf = s.grad_cdf;
  g.dcdf = s.grad_dcdf;
  g.flagged = s.grad_cdf.isZero(0.0) || s.grad_dcdf.isZero(0.0);
  return g;
}

namespace {

FieldSample sample_located(const ChartSplit& split, const Located& loc, const Vec3& p,
                           const Vec3& normal, int density) {
  const auto& cell = split.cells[loc.at.cell];
  const auto& sc = split.subcharts[cell.subchart];
  const double px = loc.at.px;
  const double py = loc.at.py;
  const Vec3 gpx = (cell.a1 - cell.a0) * loc.tri.grad_tx;
  const Vec3 gpy = (cell.b1 - cell.b0) * loc.tri.grad_ty;
  const double scale = split.cell_scale(loc.at.cell);

  FieldSample s;
  s.position = p;
  s.normal = normal.squaredNorm() > 0 ? normal.normalized() : loc.tri.normal;
  bool smooth = loc.tri.edge_distance >= kSmoothTolerance * scale &&
                std::abs(px - py) >= kSmoothTolerance;
  Vec3 gc, gd;
  if (density <= 0) {
    s.cdf = cdf_value(px, py);
    s.dcdf = dcdf_value(px, py);
    gc = px > py ? Vec3(-gpx) : Vec3(-gpy);
    gd = px < py ? gpx : gpy;
    s.offset_center = split.charts[sc.chart].center - p;
    s.offset_dual = split.duals[sc.dual].center - p;
  } else {
    const int N = density;
    const bool swapped = px < py;
    const double u = std::max(px, py);
    const double v = std::min(px, py);
    const Vec3& gu = swapped ? gpy : gpx;
    const Vec3& gv = swapped ? gpx : gpy;
    auto cell_center = [N](double x) {
      return (std::min(std::floor(N * x), N - 1.0) + 0.5) / N;
    };
    const double cu = cell_center(u), cv = cell_center(v);
    const double ru = std::floor(N * u + 0.5) / N, rv = std::floor(N * v + 0.5) / N;
    const Peak c = peak(u, v, cu, cv, 2.0 * N, gu, gv);
    const Peak d = peak(N * u, N * v, N * ru, N * rv, 2.0, N * gu, N * gv);
    s.cdf = c.value;
    s.dcdf = d.value;
    gc = c.grad;
    gd = d.grad;
    smooth = smooth && !c.tie && !d.tie;
    auto unfold = [&](double a, double b) {
      return swapped ? split.point_at(cell.subchart, b, a) : split.point_at(cell.subchart, a, b);
    };
    s.offset_center = unfold(cu, cv) - p;
    s.offset_dual = unfold(ru, rv) - p;
  }
  if (smooth) {
    s.grad_cdf = tangent_unit(gc, s.normal);
    s.grad_dcdf = tangent_unit(gd, s.normal);
  }
  return s;
}

}  // namespace

FieldSample sample_field(const ChartSplit& split, const Vec3& p, const Vec3& normal, int density) {
  return sample_located(split, locate_full(split, p, split.index()), p, normal, density);
}

std::vector<FieldSample> bake_points(const ChartSplit& split, std::span<const Vec3> points,
                                     std::span<const Vec3> normals, const BakeOptions& options) {
  std::vector<FieldSample> out;
  out.reserve(points.size());
  std::vector<int> far;
  const double limit = options.max_distance * split.diagonal;
  for (size_t i = 0; i < points.size(); ++i) {
    const Vec3 n = i < normals.size() ? normals[i] : Vec3::Zero();
    const Located loc = locate_full(split, points[i], split.index());
    if (loc.at.distance > limit) far.push_back(static_cast<int>(i));
    out.push_back(sample_located(split, loc, points[i], n, options.density));
  }
  if (!far.empty()) {
    std::string msg = "bake: " + std::to_string(far.size()) +
                      " queries farther than the allowed distance from the quad surface:";
    for (size_t k = 0; k < far.size() && k < 20; ++k) msg += " " + std::to_string(far[k]);
    if (far.size() > 20) msg += " ...";
    throw BakeDistanceError(msg, std::move(far));
  }
  return out;
}

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
  std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Vec3 n = mesh.face_normal(f) * mesh.face_area(f);
    for (int v : mesh.face_vertices(f)) normals[v] += n;
  }
  for (auto& n : normals) {
    if (n.norm() > 0) n.normalize();
  }
  return normals;
}

std::vector<FieldSample> bake_fields(const ChartSplit& split, const Mesh& target,
                                     const BakeOptions& options) {
  std::vector<Vec3> points, normals;
  switch (options.site) {
    case BakeSite::FaceCenters:
      for (int f = 0; f < target.num_faces(); ++f) {
        points.push_back(target.face_center(f));
        normals.push_back(target.face_normal(f));
      }
      break;
    case BakeSite::Vertices:
      points = target.positions();
      normals = vertex_normals(target);
      break;
    case BakeSite::Samples: {
      std::mt19937_64 rng(options.seed);
      points = sample_surface(target, options.samples, rng);
      break;
    }
  }
  return bake_points(split, points, normals, options);
}

}  // namespace quadkit
