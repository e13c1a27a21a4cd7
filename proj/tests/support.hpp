#pragma once

#include <filesystem>
#include <string>

#include "quadkit/mesh.hpp"

namespace quadkit::testing {

/// Open strip whose face-loop passes through one quad twice: it enters C from the west,
/// wraps around C's south-east corner with `chain` quads and re-enters C from the south.
Mesh crossing_strip(int chain = 6);

/// Unit cube as OBJ text, with quad or triangle faces.
std::string cube_obj(bool triangles);
/// Three triangles sharing one edge.
std::string fin_obj();

/// Fresh scratch directory under the system temp path.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace quadkit::testing

namespace quadkit::testing {

/// Disjoint union of two meshes (second one's vertices appended).
Mesh disjoint_union(const Mesh& a, const Mesh& b, const Vec3& offset = Vec3::Zero());
/// Applies x -> scale * R x + t.
Mesh transformed(const Mesh& m, const Eigen::Matrix3d& rotation, double scale, const Vec3& t);
/// Deterministic random rotation.
Eigen::Matrix3d random_rotation(uint64_t seed);

}  // namespace quadkit::testing
