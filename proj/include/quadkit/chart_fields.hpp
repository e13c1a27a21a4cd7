#pragma once

#include <array>
#include <span>
#include <vector>

#include "quadkit/base_complex.hpp"
#include "quadkit/mesh.hpp"
#include "quadkit/spatial.hpp"

namespace quadkit {

/// A quad (or a virtual piece of one) carrying subchart coordinates at its corners.
///
/// Corners are q00, q10, q11, q01 in CCW order, with coordinates (a0,b0), (a1,b0), (a1,b1),
/// (a0,b1). The fixed diagonal q00-q11 splits it into two triangles.
struct SubchartCell {
  int face = -1;
  int subchart = -1;
  std::array<Vec3, 4> corners;
  double a0 = 0, a1 = 1, b0 = 0, b1 = 1;
};

struct Subchart {
  int chart = -1;
  /// 0: low x / low y, 1: high x / low y, 2: high / high, 3: low x / high y.
  int quadrant = 0;
  std::vector<int> cells;
  /// Cells along the x and y axes, after virtual splits.
  int nx = 0;
  int ny = 0;
  int dual = -1;
};

/// Group of subcharts sharing a chart corner; the corner is its center.
struct DualChart {
  int vertex = -1;
  Vec3 center;
  std::vector<int> subcharts;
};

struct ChartFrame {
  /// Cumulative assigned lengths of grid columns (m + 1 values) and rows (n + 1 values).
  std::vector<double> xs;
  std::vector<double> ys;
  Vec3 center;
  /// Polylines joining the midpoints of opposite sides; they cross at the center.
  std::vector<Vec3> flow_x;
  std::vector<Vec3> flow_y;
  std::array<int, 4> subcharts{};

  double width() const { return xs.back(); }
  double height() const { return ys.back(); }
};

/// Where a surface point sits inside the subchart scaffold.
struct SubchartPoint {
  int cell = -1;
  /// 0 for triangle q00 q10 q11, 1 for q00 q11 q01.
  int triangle = 0;
  double px = 0;
  double py = 0;
  /// The query projected onto the scaffold surface.
  Vec3 point;
  double distance = 0;
  /// The query was not on the cell and had to be projected.
  bool projected = false;
};

/// Scaffold for evaluating chart distance fields on a quad mesh. Never modifies the mesh:
/// quads crossed by a flow line are split into virtual cells here.
class ChartSplit {
 public:
  std::vector<double> ring_length;
  std::vector<ChartFrame> charts;
  std::vector<Subchart> subcharts;
  std::vector<DualChart> duals;
  std::vector<SubchartCell> cells;
  /// Virtual cells of each mesh face (1, 2 or 4).
  std::vector<std::vector<int>> face_cells;

  /// Closest scaffold point to p and its subchart coordinates. Ties go to the lowest cell.
  SubchartPoint locate(const Vec3& p) const;
  /// Surface point with subchart coordinates (px, py) in subchart s.
  Vec3 point_at(int subchart, double px, double py) const;
  /// Typical edge length of a cell.
  double cell_scale(int cell) const;
  /// Bounding-box diagonal of the quad mesh.
  double diagonal = 0;

  void build_index();
  const TriangleIndex& index() const { return index_; }

 private:
  TriangleIndex index_;
};

/// Splits every chart at the midpoints of its edge-loops, measured with `lengths`.
ChartSplit split_charts(const Mesh& mesh, const BaseComplex& complex,
                        const std::vector<double>& lengths);
/// Base complex with feature loops plus ring lengths, then split.
ChartSplit split_quad_mesh(const Mesh& mesh);

/// Coordinates of p inside a quad via edge-direction projections on the rigidly flattened
/// triangle containing p. If p lies on neither triangle it is projected to the nearer one
/// and `flagged` is set.
struct CellCoords {
  double px = 0;
  double py = 0;
  int triangle = 0;
  bool flagged = false;
};
CellCoords subchart_coords(const Vec3& p, const std::array<Vec3, 4>& quad, double a0, double a1,
                           double b0, double b1);

inline double cdf_value(double px, double py) { return 1.0 - std::max(px, py); }
inline double dcdf_value(double px, double py) { return std::min(px, py); }

double eval_cdf(const ChartSplit& split, const Vec3& p);
double eval_dcdf(const ChartSplit& split, const Vec3& p);

struct FieldGradients {
  Vec3 cdf = Vec3::Zero();
  Vec3 dcdf = Vec3::Zero();
  /// True when p is within 1e-7 (relative to cell size) of a non-smooth locus; both
  /// gradients are then zero.
  bool flagged = false;
};

FieldGradients field_gradients(const ChartSplit& split, const Vec3& p);

struct FieldSample {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  double cdf = 0;
  double dcdf = 0;
  Vec3 grad_cdf = Vec3::Zero();
  Vec3 grad_dcdf = Vec3::Zero();
  Vec3 offset_center = Vec3::Zero();
  Vec3 offset_dual = Vec3::Zero();
};

/// Full field record at p. With `density` >= 1 the values, gradients and offsets are those
/// of the densified fields.
FieldSample sample_field(const ChartSplit& split, const Vec3& p, const Vec3& normal,
                         int density = 0);

struct Densified {
  double cdf = 0;
  double dcdf = 0;
};

/// Closed-form densification with (u, v) = (1 - cdf, dcdf). Throws for N < 1.
Densified densify(double cdf, double dcdf, int N);

enum class BakeSite { FaceCenters, Vertices, Samples };

/// Thrown when bake queries are too far from the quad surface.
class BakeDistanceError : public InputError {
 public:
  BakeDistanceError(std::string what, std::vector<int> indices)
      : InputError(std::move(what)), indices_(std::move(indices)) {}
  const std::vector<int>& indices() const { return indices_; }

 private:
  std::vector<int> indices_;
};

struct BakeOptions {
  BakeSite site = BakeSite::FaceCenters;
  int samples = 10000;
  uint64_t seed = 0;
  int density = 0;
  /// Queries farther than this fraction of the bbox diagonal are rejected.
  double max_distance = 0.05;
};

std::vector<FieldSample> bake_points(const ChartSplit& split, std::span<const Vec3> points,
                                     std::span<const Vec3> normals, const BakeOptions& options = {});
std::vector<FieldSample> bake_fields(const ChartSplit& split, const Mesh& target,
                                     const BakeOptions& options = {});

/// Area-weighted unit vertex normals.
std::vector<Vec3> vertex_normals(const Mesh& mesh);

}  // namespace quadkit
