#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadkit/chart_fields.hpp"
#include "quadkit/clustering.hpp"
#include "quadkit/curation.hpp"
#include "quadkit/layout.hpp"
#include "quadkit/loop_metrics.hpp"
#include "quadkit/mesh_io.hpp"
#include "quadkit/refine.hpp"
#include "quadkit/remesh.hpp"
#include "quadkit/tri2quad.hpp"

namespace quadkit {

struct SeedOptions {
  int rings = kSeedRings;
  /// Scale `rings` down from the half-million-face reference density.
  bool scale_rings = false;
};

struct PipelineConfig {
  /// Seeds samplers, noise and palettes.
  uint64_t seed = 0;
  RemeshOptions remesh{.target = 0.015};
  BakeOptions bake;
  SeedOptions seeds;
  ClusterOptions cluster;
  ExtractOptions extract;
  /// Highest densification tried when extraction fails at the configured density.
  int max_density = 2;
  RefineOptions refine;
  int hausdorff_samples = 100000;
  /// Amplitude of uniform noise added to the baked cdf (round trip robustness runs).
  double noise = 0.0;
  CurationThresholds curation;
  DedupOptions dedup;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Missing keys keep their defaults; unknown keys and wrong types throw InputError.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const PipelineConfig& config);

/// {vertices, faces, boundaries, N_I, N_c, genus}.
nlohmann::json topology_json(const Mesh& mesh, const BaseComplex& complex);
/// {S_l, S_fl, S_el, N_c, N_I, d_h, SJ_min, SJ_mean}; d_h is null without a reference.
nlohmann::json metrics_json(const Mesh& mesh, const BaseComplex& complex, const SimplicityReport& report,
                            const Mesh* reference, int hausdorff_samples, uint64_t seed);
/// {input_tris, quads, remaining_tris, purity, loop_shifts_applied}.
nlohmann::json tri2quad_json(const Tri2QuadStats& stats);
nlohmann::json verdict_json(const CurationVerdict& verdict);

/// Per-face colors from a palette seeded by `seed` and the cluster id.
std::vector<Rgb> cluster_palette(int clusters, uint64_t seed);
/// PLY with each face flat-colored by its cluster (vertices are duplicated per face).
void write_cluster_ply(const std::filesystem::path& path, const Mesh& mesh, const std::vector<int>& face_cluster,
                       uint64_t seed);
/// PLY with vertices colored by the baked cdf (or dcdf) of the nearest face sample.
void write_field_ply(const std::filesystem::path& path, const Mesh& mesh, const std::vector<FieldSample>& field,
                     bool dual = false);

/// Adds uniform noise in [-amplitude, amplitude] to every cdf value.
void add_cdf_noise(std::vector<FieldSample>& field, double amplitude, uint64_t seed);

struct Extraction {
  std::vector<int> seeds;
  ClusterPartition partition;
  ExtractReport extract_report;
  LayoutMesh layout;
  int collapses = 0;
  Mesh refined;
  RefineReport refine_report;
};

/// Seeds, clusters, traces and collapses a layout from per-face samples on `surface`, then
/// refines it onto `surface`. Throws LayoutError when no layout can be traced.
Extraction extract_from_field(const Mesh& surface, const std::vector<FieldSample>& field,
                              const PipelineConfig& config, bool refine_layout = true);

/// {seeds, clusters, merges, non_quad_faces, subdivision_levels, ...}.
nlohmann::json extraction_json(const Extraction& extraction);

struct RoundTripAttempt {
  int density = 0;
  int seeds = 0;
  int clusters = 0;
  int merges = 0;
  /// Why the next density was tried; empty for the final attempt.
  std::string outcome;
};

struct RoundTripReport {
  int N_c_in = 0;
  int N_c_out = 0;
  /// Chart count of the ground truth at the final density (4 N^2 N_c_in when densified).
  int expected_charts = 0;
  bool chart_count_match = false;
  bool adjacency_isomorphic = false;
  double S_l_in = 1.0;
  double S_l_out = 0.0;
  int density = 0;
  bool densified = false;
  int non_quad_faces = 0;
  int refined_faces = 0;
  int subdivision_levels = 0;
  double hausdorff = 0.0;
  int surface_faces = 0;
  std::vector<RoundTripAttempt> attempts;
  /// Set when every density failed.
  std::string error;

  bool success() const { return error.empty() && chart_count_match && adjacency_isomorphic; }
};

nlohmann::json round_trip_json(const RoundTripReport& report);

struct RoundTripArtifacts {
  Mesh surface;
  std::vector<FieldSample> field;
  std::optional<Extraction> extraction;
};

/// Remesh -> bake -> extract -> refine -> compare on a quad mesh. The density is raised
/// (up to `max_density`) when extraction fails, splits a non-disk cluster or leaves
/// non-quads before the last density.
RoundTripReport round_trip(const Mesh& quad, const PipelineConfig& config = {},
                           RoundTripArtifacts* artifacts = nullptr);

}  // namespace quadkit
