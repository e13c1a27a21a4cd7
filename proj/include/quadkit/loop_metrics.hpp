#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "quadkit/base_complex.hpp"
#include "quadkit/loops.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

enum class RotationMode {
  /// |total signed turning| / 2pi: the turning number of the projected curve.
  Signed,
  /// Sum of |turning angles| / 2pi.
  Absolute,
};

struct LoopMeasure {
  int self_intersections = 0;
  double rotation_index = 0.0;
  bool is_simple = true;
};

/// Repeated faces (face-loops) or repeated polyline vertices (edge-loops).
int self_intersection_count(const FaceLoop& loop);
int self_intersection_count(const EdgeLoop& loop);

/// Rotation index of a 3D polyline projected onto its best-fit plane. Polylines with fewer
/// than three distinct nodes, or collinear within 1e-9, give 0.
double rotation_index(std::span<const Vec3> polyline, bool closed,
                      RotationMode mode = RotationMode::Signed);

std::vector<Vec3> loop_polyline(const Mesh& mesh, const FaceLoop& loop);
std::vector<Vec3> loop_polyline(const Mesh& mesh, const EdgeLoop& loop);

LoopMeasure measure_loop(const Mesh& mesh, const FaceLoop& loop,
                         RotationMode mode = RotationMode::Signed);
LoopMeasure measure_loop(const Mesh& mesh, const EdgeLoop& loop,
                         RotationMode mode = RotationMode::Signed);

/// Slack allowed above 1 when testing rotation_index <= 1 for a simple loop.
inline constexpr double kRotationTolerance = 1e-9;

struct SimplicityReport {
  double S_fl = 1.0;
  double S_el = 1.0;
  double S_l = 1.0;
  int N_c = 0;
  /// Irregular vertices excluding boundary valence-2 corners.
  int N_I = 0;
  /// Irregular vertices including boundary valence-2 corners.
  int N_I_all = 0;
  bool pure_quad = true;
  std::vector<FaceLoop> face_loops;
  std::vector<EdgeLoop> edge_loops;
  std::vector<LoopMeasure> face_loop_measures;
  std::vector<LoopMeasure> edge_loop_measures;
};

/// Loop simplicity scores. Non-quad faces are skipped (pure_quad = false).
SimplicityReport loop_simplicity(const Mesh& mesh, const BaseComplex* complex = nullptr,
                                 RotationMode mode = RotationMode::Signed);

struct JacobianStats {
  double min = 1.0;
  double mean = 1.0;
  std::vector<double> per_face;
  /// Faces with a zero-length edge (scored -1).
  std::vector<int> flagged;
};

/// Minimum corner scaled Jacobian per quad; area-weighted mean and global min.
JacobianStats scaled_jacobian(const Mesh& mesh);

/// Area-weighted random points on the surface.
std::vector<Vec3> sample_surface(const Mesh& mesh, int count, std::mt19937_64& rng);

/// Symmetric sampled Hausdorff distance in percent of the bounding-box diagonal of `a`.
double hausdorff(const Mesh& a, const Mesh& b, int samples = 100000, uint64_t seed = 0);
/// Max distance from samples of `from` to the surface of `to`, in percent of `diagonal`.
double one_sided_hausdorff(const Mesh& from, const Mesh& to, double diagonal, int samples,
                           uint64_t seed);

}  // namespace quadkit
