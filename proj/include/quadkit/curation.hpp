#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadkit/base_complex.hpp"
#include "quadkit/loop_metrics.hpp"
#include "quadkit/mesh.hpp"

namespace quadkit {

/// PCA alignment (largest area-weighted variance along x), per-axis skewness made
/// non-negative, then a uniform scale so the bounding box fits [-1,1]^3 centered at the
/// origin. Face winding is reversed when the alignment is a reflection. Throws InputError
/// when all vertices coincide.
Mesh normalize(const Mesh& mesh);

struct CurationThresholds {
  double min_simplicity = 0.618;
  /// Distance of a quad's fourth vertex to the plane of the other three over its mean edge
  /// length.
  double max_non_planarity = 0.5;
  int max_charts = 1024;
  double min_chart_area = 1.0 / 1024.0;
  /// sqrt(1/1024).
  double min_chart_side = 1.0 / 32.0;
  int max_boundaries = 8;
};

struct CurationMeasures {
  double S_l = 1.0;
  int N_c = 0;
  double min_chart_area = 0.0;
  double min_chart_side = 0.0;
  double max_non_planarity = 0.0;
  int boundaries = 0;
  int interior_singularities = 0;
};

struct CurationCheck {
  std::string name;
  bool pass = true;
  double value = 0.0;
  double threshold = 0.0;
};

struct CurationVerdict {
  bool keep = true;
  /// Name of the first failing check, empty when kept.
  std::string reason;
  std::vector<CurationCheck> checks;
  CurationMeasures measured;
};

/// Measures a (normalized) quad mesh against its base complex and simplicity report.
CurationMeasures measure_for_curation(const Mesh& mesh, const BaseComplex& complex,
                                      const SimplicityReport& report);

/// Checks in order: simplicity, planarity, chart-count, chart-area, chart-side,
/// boundaries, trivial-layout. Depends on the measured values only.
CurationVerdict judge(const CurationMeasures& measured, const CurationThresholds& thresholds = {});

CurationVerdict filter_mesh(const Mesh& mesh, const BaseComplex& complex, const SimplicityReport& report,
                            const CurationThresholds& thresholds = {});

double quad_non_planarity(const Mesh& mesh, int f);

/// Sorted valence histogram, face count, reported irregular count and the sorted
/// multiset of chart dimensions.
struct ConnectivityFingerprint {
  std::vector<std::pair<int, int>> valences;
  int faces = 0;
  int irregular = 0;
  std::vector<std::pair<int, int>> chart_sizes;

  bool operator==(const ConnectivityFingerprint&) const = default;
  auto operator<=>(const ConnectivityFingerprint&) const = default;
};

ConnectivityFingerprint fingerprint(const Mesh& mesh, const BaseComplex& complex);

/// Symmetric chamfer distance: mean of the two one-sided mean point-to-surface distances
/// over `samples` area-weighted samples of each mesh.
double chamfer_distance(const Mesh& a, const Mesh& b, int samples = 2048, uint64_t seed = 0);

struct DedupItem {
  int id = 0;
  const Mesh* mesh = nullptr;
  ConnectivityFingerprint print;
};

struct DedupOptions {
  int samples = 2048;
  double tolerance = 1e-3;
  uint64_t seed = 0;
};

/// Duplicate of[i] is the id of the representative item i duplicates, or -1 when it is
/// kept. Items are visited by id, so the kept set does not depend on input order.
std::vector<int> dedup(const std::vector<DedupItem>& items, const DedupOptions& options = {});

}  // namespace quadkit
