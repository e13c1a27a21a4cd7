#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quadkit/mesh.hpp"

namespace quadkit {

/// Splits every coarse quad into k x k quads. Points on shared coarse edges are generated
/// once, so the result is watertight wherever the coarse mesh is.
Mesh subdivide_quads(const std::vector<Vec3>& positions, const std::vector<std::array<int, 4>>& quads,
                     int k);

/// Planar m x n grid over [0, width] x [0, height] in the xy-plane.
Mesh grid_patch(int m, int n, double width = 1.0, double height = 1.0);

/// Boundary surface of a union of unit voxels, each voxel face split k x k. Coordinates are
/// voxel lattice units scaled by `scale`.
Mesh polycube(const std::vector<std::array<int, 3>>& voxels, int k, double scale = 1.0);

/// Cube [-1,1]^3 with every face split k x k.
Mesh cube(int k);
/// Axis-aligned box of sx x sy x sz unit cells, each cell face split k x k.
Mesh box(int sx, int sy, int sz, int k);
/// L-shaped bracket: three voxels in an L, extruded one voxel deep.
Mesh l_bracket(int k);
/// Cube with k x k faces projected onto the unit sphere.
Mesh cube_sphere(int k);

/// Open tube with `around` x `along` quads.
Mesh cylinder(int around, int along, double radius = 1.0, double height = 2.0);
/// Closed torus grid.
Mesh torus(int nu, int nv, double major = 1.0, double minor = 0.4);
/// Planar disk made of `sides` quads around a center vertex of valence `sides`, each split k x k.
Mesh star_patch(int sides, int k);

/// Tube whose quads follow a helix: vertex i sits at angle 2*pi*i/around and height
/// i * pitch / around; face i is (i, i+1, i+1+around, i+around).
Mesh helical_cylinder(int around, int turns, double radius = 1.0, double pitch = 0.5);

/// Subdivided icosahedron on the unit sphere.
Mesh icosphere(int level);

/// Splits every quad along a random diagonal (seeded); other faces are fan-triangulated.
Mesh triangulate_quads(const Mesh& mesh, uint64_t seed);

struct NamedMesh {
  std::string name;
  Mesh mesh;
};

/// The small reference corpus used by the round-trip tests and the `corpus` command.
std::vector<NamedMesh> desk_corpus();

}  // namespace quadkit
