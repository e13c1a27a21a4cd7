#pragma once

#include <vector>

#include "quadkit/loops.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

inline constexpr double kSharpAngleDegrees = 130.0;

/// Dihedral angle in degrees between the two faces of an interior edge (180 = flat).
/// Boundary edges report 0.
double dihedral_angle(const Mesh& mesh, int e);

/// Interior edges with dihedral angle below the threshold; boundary edges always.
std::vector<bool> detect_sharp_edges(const Mesh& mesh,
                                     double angle_threshold = kSharpAngleDegrees);

/// Edge-loops consisting entirely of sharp interior edges. Boundary loops are excluded
/// since boundaries are separatrices anyway.
std::vector<EdgeLoop> sharp_edge_loops(const Mesh& mesh, const std::vector<bool>& sharp);

}  // namespace quadkit
