#pragma once

#include "quadkit/mesh.hpp"

namespace quadkit {

struct RemeshOptions {
  /// Target edge length as a fraction of the bounding-box diagonal.
  double target = 0.02;
  int iterations = 10;
  bool preserve_sharp = true;
  double sharp_angle = 130.0;
  /// Feature vertices whose two feature edges turn by more than this (degrees) stay fixed.
  double corner_turn = 30.0;
};

/// Split / collapse / flip / tangential relaxation remeshing of a triangle mesh, projecting
/// back onto the input. Sharp edges and boundaries are kept as polylines and tagged as
/// feature edges on the result. Throws InputError for non-triangle input.
Mesh isotropic_remesh(const Mesh& mesh, const RemeshOptions& options = {});

/// Face count implied by an equilateral tiling of the surface at edge length `length`.
double implied_face_count(const Mesh& mesh, double length);

}  // namespace quadkit
