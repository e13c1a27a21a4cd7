#pragma once

#include <functional>
#include <vector>

#include "quadkit/layout.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

struct RefineOptions {
  int max_subdiv = 3;
  int max_faces = 20000;
  bool smooth = true;
  int sweeps = 20;
  /// Stop sweeping once no vertex moves more than this fraction of the bbox diagonal.
  double tolerance = 1e-6;
};

struct RefineReport {
  int levels = 0;
  int sweeps = 0;
};

/// Midpoint subdivision, Winslow smoothing and projection onto `reference`, repeated up to
/// the level and face caps. The result is pure quad. Feature vertices stay on the feature
/// polylines of the reference (its tagged edges, or sharp edges when untagged).
Mesh refine(const LayoutMesh& layout, const Mesh& reference, const RefineOptions& options = {},
            RefineReport* report = nullptr);

/// One midpoint subdivision step: every n-gon becomes n quads and tagged feature edges
/// are split into tagged halves.
Mesh midpoint_subdivide(const Mesh& mesh);

/// Gauss-Seidel Winslow sweeps in vertex order over vertices not in `fixed`. Regular
/// interior vertices use the nine-point stencil, others the mean of their neighbours.
/// When `project` is set each update is restricted to the vertex tangent plane and then
/// passed through it, keeping a curved surface from collapsing onto its chords. With
/// `guarded` a move is skipped when it lowers the worst scaled Jacobian of the vertex's
/// faces. Returns the number of sweeps run.
int winslow_smooth(std::vector<Vec3>& positions, const Mesh& mesh, const std::vector<char>& fixed,
                   int sweeps = 20, double tolerance = 1e-6,
                   const std::function<Vec3(const Vec3&)>& project = {}, bool guarded = false);

}  // namespace quadkit
