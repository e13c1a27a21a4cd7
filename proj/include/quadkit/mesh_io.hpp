#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "quadkit/mesh.hpp"

namespace quadkit {

/// Parses OBJ text: `v`, `f` (with v/vt/vn and negative indices) and `l` records.
PolygonSoup read_obj(std::istream& in);
/// Parses ASCII or binary little-endian PLY (vertex x/y/z, face vertex_indices).
PolygonSoup read_ply(std::istream& in);
/// Reads OBJ or PLY by extension.
PolygonSoup read_polygon_soup(const std::filesystem::path& path);

/// Merges vertices with bit-identical coordinates. Returns the number merged.
int merge_exact_duplicates(PolygonSoup& soup);

struct LoadedMesh {
  Mesh mesh;
  MeshKind kind = MeshKind::Mixed;
  ManifoldReport report;
  /// Feature polylines from `l` records, vertex ids after dedup.
  std::vector<std::vector<int>> lines;
};

LoadedMesh load_mesh(const std::filesystem::path& path, bool diagnostic = false);
LoadedMesh load_mesh_from_soup(PolygonSoup soup, bool diagnostic = false);

void write_obj(std::ostream& out, const std::vector<Vec3>& positions,
               const std::vector<std::vector<int>>& faces,
               const std::vector<std::vector<int>>& lines = {});
void write_obj(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::vector<int>>& lines = {});
void write_obj(const std::filesystem::path& path, const std::vector<Vec3>& positions,
               const std::vector<std::vector<int>>& faces,
               const std::vector<std::vector<int>>& lines = {});

using Rgb = std::array<uint8_t, 3>;

/// ASCII PLY with per-vertex colors.
void write_ply_colored(const std::filesystem::path& path, const std::vector<Vec3>& positions,
                       const std::vector<std::vector<int>>& faces,
                       const std::vector<Rgb>& vertex_colors);

}  // namespace quadkit
