#pragma once

#include <array>
#include <optional>
#include <vector>

#include "quadkit/mesh.hpp"

namespace quadkit {

inline constexpr double kMinMergeDihedral = 120.0;

/// A quad candidate formed by the two triangles on either side of an interior edge.
struct MergeCandidate {
  int edge = -1;
  /// Quad corners in CCW order (a, d, b, c) for the shared edge a-b.
  std::array<int, 4> quad{};
  /// Sum of |corner angle - 90| in degrees after projection onto the mean-normal plane.
  double rectangularity = 0;
  double dihedral = 0;
  bool convex = false;

  bool admissible() const { return dihedral >= kMinMergeDihedral && convex; }
};

/// Candidate for edge e, or nullopt if e is not shared by two distinct triangles.
std::optional<MergeCandidate> merge_candidate(const Mesh& mesh, int e);

/// Rectangularity of the quad p0 p1 p2 p3 projected onto the plane orthogonal to `normal`,
/// and whether the projection is strictly convex.
struct QuadShape {
  double rectangularity = 0;
  bool convex = false;
};
QuadShape quad_shape(const std::array<Vec3, 4>& quad, const Vec3& normal);

/// Sum of the angles (degrees) between the current quad's sides leading into the shared edge
/// and the candidate's sides leaving it. Both quads are CCW vertex cycles sharing edge a-b.
double misalignment(const std::vector<Vec3>& positions, const std::array<int, 4>& candidate,
                    const std::array<int, 4>& current, int a, int b);

/// Quads and leftover triangles over the input vertices.
struct QuadDominantMesh {
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> faces;
  /// Input faces each output face was made from (two triangles for merged quads).
  std::vector<std::vector<int>> sources;

  int num_quads() const;
  int num_triangles() const;
};

struct Tri2QuadStats {
  int input_triangles = 0;
  int quads = 0;
  int remaining_triangles = 0;
  /// Share of the input triangles that ended up in quads, in percent.
  double purity = 100;
  int loop_shifts = 0;
};

/// Pairing state over the faces of the input mesh: partner[f] is the face merged with f or -1.
struct TrianglePairing {
  std::vector<int> partner;
  /// Edge shared with the partner, -1 when unmerged.
  std::vector<int> via;
};

/// Direction-aligned greedy merging.
TrianglePairing merge_pairing(const Mesh& mesh);
/// Re-pairs triangles along alternating paths to absorb leftovers. Returns the number of
/// shifts applied.
int loop_shift_pairing(const Mesh& mesh, TrianglePairing& pairing);

QuadDominantMesh build_quad_dominant(const Mesh& mesh, const TrianglePairing& pairing);

QuadDominantMesh merge_triangles(const Mesh& mesh);
/// Applies loop shifting to a merged result of `mesh` (identified through `sources`).
QuadDominantMesh loop_shift(const Mesh& mesh, const QuadDominantMesh& merged, int* shifts = nullptr);

/// merge_triangles followed by loop_shift.
QuadDominantMesh tri_to_quad(const Mesh& mesh, Tri2QuadStats* stats = nullptr);

}  // namespace quadkit
