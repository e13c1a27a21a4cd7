#include "quadkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "quadkit/base_complex.hpp"
#include "quadkit/field_io.hpp"
#include "quadkit/graph.hpp"
#include "quadkit/loops.hpp"
#include "quadkit/shapes.hpp"
#include "quadkit/spatial.hpp"

namespace quadkit {
namespace {

using json = nlohmann::json;

const char* site_name(BakeSite s) {
  switch (s) {
    case BakeSite::FaceCenters: return "faces";
    case BakeSite::Vertices: return "vertices";
    case BakeSite::Samples: return "samples";
  }
  return "faces";
}

BakeSite site_from(const std::string& s) {
  if (s == "faces") return BakeSite::FaceCenters;
  if (s == "vertices") return BakeSite::Vertices;
  if (s == "samples") return BakeSite::Samples;
  throw InputError("config: unknown bake site '" + s + "'");
}

// Reads known keys of one section into existing values, rejecting anything unexpected.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw InputError("config: section '" + name_ + "' must be an object");
  }
  template <class T>
  Section& get(const char* key, T& value) {
    seen_.insert(key);
    if (!j_.contains(key)) return *this;
    try {
      value = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InputError("config: bad value for '" + name_ + "." + key + "'");
    }
    return *this;
  }
  const json& sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return j_.contains(key) ? j_.at(key) : empty;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw InputError("config: unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

Rgb palette_color(uint64_t seed, int id) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(id));
  std::uniform_int_distribution<int> channel(40, 230);
  return {static_cast<uint8_t>(channel(rng)), static_cast<uint8_t>(channel(rng)), static_cast<uint8_t>(channel(rng))};
}

std::vector<double> cdf_values(const std::vector<FieldSample>& field) {
  std::vector<double> out(field.size());
  for (size_t i = 0; i < field.size(); ++i) out[i] = field[i].cdf;
  return out;
}

}  // namespace

json to_json(const PipelineConfig& c) {
  return {
      {"seed", c.seed},
      {"remesh",
       {{"target", c.remesh.target},
        {"iterations", c.remesh.iterations},
        {"preserve_sharp", c.remesh.preserve_sharp},
        {"sharp_angle", c.remesh.sharp_angle},
        {"corner_turn", c.remesh.corner_turn}}},
      {"bake",
       {{"site", site_name(c.bake.site)},
        {"samples", c.bake.samples},
        {"density", c.bake.density},
        {"max_distance", c.bake.max_distance}}},
      {"seeds", {{"rings", c.seeds.rings}, {"scale_rings", c.seeds.scale_rings}}},
      {"cluster",
       {{"wall", c.cluster.wall},
        {"merge_level", c.cluster.merge_level},
        {"merge_fraction", c.cluster.merge_fraction},
        {"use_dual", c.cluster.use_dual},
        {"block_sharp", c.cluster.block_sharp}}},
      {"extract",
       {{"boundary_corner", c.extract.boundary_corner},
        {"max_splits", c.extract.max_splits},
        {"max_density", c.max_density}}},
      {"refine",
       {{"max_subdiv", c.refine.max_subdiv},
        {"max_faces", c.refine.max_faces},
        {"smooth", c.refine.smooth},
        {"sweeps", c.refine.sweeps},
        {"tolerance", c.refine.tolerance}}},
      {"metrics", {{"hausdorff_samples", c.hausdorff_samples}}},
      {"noise", c.noise},
      {"curation",
       {{"min_simplicity", c.curation.min_simplicity},
        {"max_non_planarity", c.curation.max_non_planarity},
        {"max_charts", c.curation.max_charts},
        {"min_chart_area", c.curation.min_chart_area},
        {"min_chart_side", c.curation.min_chart_side},
        {"max_boundaries", c.curation.max_boundaries},
        {"dedup_samples", c.dedup.samples},
        {"dedup_tolerance", c.dedup.tolerance}}},
  };
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  Section top(j, "config");
  top.get("seed", c.seed).get("noise", c.noise);
  {
    Section s(top.sub("remesh"), "remesh");
    s.get("target", c.remesh.target)
        .get("iterations", c.remesh.iterations)
        .get("preserve_sharp", c.remesh.preserve_sharp)
        .get("sharp_angle", c.remesh.sharp_angle)
        .get("corner_turn", c.remesh.corner_turn)
        .finish();
  }
  {
    Section s(top.sub("bake"), "bake");
    std::string site = site_name(c.bake.site);
    s.get("site", site).get("samples", c.bake.samples).get("density", c.bake.density).get("max_distance", c.bake.max_distance);
    s.finish();
    c.bake.site = site_from(site);
  }
  {
    Section s(top.sub("seeds"), "seeds");
    s.get("rings", c.seeds.rings).get("scale_rings", c.seeds.scale_rings).finish();
  }
  {
    Section s(top.sub("cluster"), "cluster");
    s.get("wall", c.cluster.wall)
        .get("merge_level", c.cluster.merge_level)
        .get("merge_fraction", c.cluster.merge_fraction)
        .get("use_dual", c.cluster.use_dual)
        .get("block_sharp", c.cluster.block_sharp)
        .finish();
  }
  {
    Section s(top.sub("extract"), "extract");
    s.get("boundary_corner", c.extract.boundary_corner)
        .get("max_splits", c.extract.max_splits)
        .get("max_density", c.max_density)
        .finish();
  }
  {
    Section s(top.sub("refine"), "refine");
    s.get("max_subdiv", c.refine.max_subdiv)
        .get("max_faces", c.refine.max_faces)
        .get("smooth", c.refine.smooth)
        .get("sweeps", c.refine.sweeps)
        .get("tolerance", c.refine.tolerance)
        .finish();
  }
  {
    Section s(top.sub("metrics"), "metrics");
    s.get("hausdorff_samples", c.hausdorff_samples).finish();
  }
  {
    Section s(top.sub("curation"), "curation");
    s.get("min_simplicity", c.curation.min_simplicity)
        .get("max_non_planarity", c.curation.max_non_planarity)
        .get("max_charts", c.curation.max_charts)
        .get("min_chart_area", c.curation.min_chart_area)
        .get("min_chart_side", c.curation.min_chart_side)
        .get("max_boundaries", c.curation.max_boundaries)
        .get("dedup_samples", c.dedup.samples)
        .get("dedup_tolerance", c.dedup.tolerance)
        .finish();
  }
  top.finish();
  c.dedup.seed = c.seed;
  c.bake.seed = c.seed;
  if (c.max_density < 0 || c.max_density > 4) throw InputError("config: extract.max_density must be in [0, 4]");
  if (c.seeds.rings < 1) throw InputError("config: seeds.rings must be positive");
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(config).dump(2) << "\n";
}

json topology_json(const Mesh& mesh, const BaseComplex& complex) {
  const int boundaries = static_cast<int>(mesh.boundary_loops().size());
  const int components = mesh.num_components();
  return {{"vertices", mesh.num_vertices()},
          {"faces", mesh.num_faces()},
          {"boundaries", boundaries},
          {"N_I", count_reported_irregular(irregular_vertices(mesh))},
          {"N_c", complex.num_charts()},
          {"genus", (2 * components - mesh.euler_characteristic() - boundaries) / 2}};
}

json metrics_json(const Mesh& mesh, const BaseComplex& complex, const SimplicityReport& report,
                  const Mesh* reference, int hausdorff_samples, uint64_t seed) {
  const auto sj = scaled_jacobian(mesh);
  json j = {{"S_l", report.S_l},
            {"S_fl", report.S_fl},
            {"S_el", report.S_el},
            {"N_c", complex.num_charts()},
            {"N_I", report.N_I},
            {"d_h", nullptr},
            {"SJ_min", sj.min},
            {"SJ_mean", sj.mean},
            {"pure_quad", report.pure_quad},
            {"face_loops", report.face_loops.size()},
            {"edge_loops", report.edge_loops.size()}};
  if (reference) j["d_h"] = hausdorff(mesh, *reference, hausdorff_samples, seed);
  return j;
}

json tri2quad_json(const Tri2QuadStats& s) {
  return {{"input_tris", s.input_triangles},
          {"quads", s.quads},
          {"remaining_tris", s.remaining_triangles},
          {"purity", s.purity},
          {"loop_shifts_applied", s.loop_shifts}};
}

json verdict_json(const CurationVerdict& v) {
  json checks = json::array();
  for (const auto& c : v.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}});
  }
  const auto& m = v.measured;
  return {{"keep", v.keep},
          {"reason", v.reason},
          {"checks", checks},
          {"measured",
           {{"S_l", m.S_l},
            {"N_c", m.N_c},
            {"min_chart_area", m.min_chart_area},
            {"min_chart_side", m.min_chart_side},
            {"max_non_planarity", m.max_non_planarity},
            {"boundaries", m.boundaries},
            {"interior_singularities", m.interior_singularities}}}};
}

std::vector<Rgb> cluster_palette(int clusters, uint64_t seed) {
  std::vector<Rgb> out(std::max(clusters, 0));
  for (int c = 0; c < clusters; ++c) out[c] = palette_color(seed, c);
  return out;
}

void write_cluster_ply(const std::filesystem::path& path, const Mesh& mesh, const std::vector<int>& face_cluster,
                       uint64_t seed) {
  const int clusters = face_cluster.empty() ? 0 : *std::max_element(face_cluster.begin(), face_cluster.end()) + 1;
  const auto palette = cluster_palette(clusters, seed);
  std::vector<Vec3> positions;
  std::vector<std::vector<int>> faces;
  std::vector<Rgb> colors;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    std::vector<int> face;
    const int c = face_cluster[f];
    for (int v : mesh.face_vertices(f)) {
      face.push_back(static_cast<int>(positions.size()));
      positions.push_back(mesh.position(v));
      colors.push_back(c >= 0 ? palette[c] : Rgb{0, 0, 0});
    }
    faces.push_back(std::move(face));
  }
  write_ply_colored(path, positions, faces, colors);
}

void write_field_ply(const std::filesystem::path& path, const Mesh& mesh, const std::vector<FieldSample>& field,
                     bool dual) {
  auto value = [&](const FieldSample& s) { return dual ? s.dcdf : s.cdf; };
  std::vector<double> per_vertex(mesh.num_vertices(), 0.0);
  if (static_cast<int>(field.size()) == mesh.num_vertices()) {
    for (int v = 0; v < mesh.num_vertices(); ++v) per_vertex[v] = value(field[v]);
  } else if (static_cast<int>(field.size()) == mesh.num_faces()) {
    std::vector<int> count(mesh.num_vertices(), 0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      for (int v : mesh.face_vertices(f)) {
        per_vertex[v] += value(field[f]);
        ++count[v];
      }
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (count[v]) per_vertex[v] /= count[v];
    }
  } else if (!field.empty()) {
    std::vector<Vec3> points;
    for (const auto& s : field) points.push_back(s.position);
    const PointIndex index(std::move(points));
    for (int v = 0; v < mesh.num_vertices(); ++v) per_vertex[v] = value(field[index.nearest(mesh.position(v))]);
  }
  std::vector<Rgb> colors(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) colors[v] = field_color(per_vertex[v]);
  write_ply_colored(path, mesh.positions(), mesh.face_polygons(), colors);
}

void add_cdf_noise(std::vector<FieldSample>& field, double amplitude, uint64_t seed) {
  if (amplitude <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-amplitude, amplitude);
  for (auto& s : field) s.cdf += jitter(rng);
}

Extraction extract_from_field(const Mesh& surface, const std::vector<FieldSample>& field,
                              const PipelineConfig& config, bool refine_layout) {
  if (static_cast<int>(field.size()) != surface.num_faces()) {
    throw InputError("extract: expected one field sample per face (" + std::to_string(surface.num_faces()) +
                     "), got " + std::to_string(field.size()));
  }
  Extraction out;
  const auto cdf = cdf_values(field);
  const int rings = config.seeds.scale_rings ? scaled_seed_rings(surface.num_faces(), config.seeds.rings)
                                             : config.seeds.rings;
  out.seeds = detect_seeds(surface, cdf, rings);
  out.partition = cluster_faces(surface, field, out.seeds, config.cluster);
  out.layout = extract_layout(surface, out.partition, config.extract, &out.extract_report);
  out.collapses = collapse_to_quads(out.layout);
  if (refine_layout) out.refined = refine(out.layout, surface, config.refine, &out.refine_report);
  return out;
}

json extraction_json(const Extraction& e) {
  json warnings = e.extract_report.warnings;
  return {{"seeds", e.seeds.size()},
          {"clusters", e.partition.num_clusters()},
          {"merges", e.partition.merges},
          {"forced_faces", e.partition.forced},
          {"split_clusters", e.extract_report.split_clusters},
          {"corners", e.extract_report.corners},
          {"layout_faces", e.layout.num_faces()},
          {"collapses", e.collapses},
          {"non_quad_faces", e.layout.num_non_quads()},
          {"subdivision_levels", e.refine_report.levels},
          {"refined_faces", e.refined.num_faces()},
          {"warnings", warnings}};
}

json round_trip_json(const RoundTripReport& r) {
  json attempts = json::array();
  for (const auto& a : r.attempts) {
    attempts.push_back({{"density", a.density},
                        {"seeds", a.seeds},
                        {"clusters", a.clusters},
                        {"merges", a.merges},
                        {"outcome", a.outcome}});
  }
  return {{"N_c_in", r.N_c_in},
          {"N_c_out", r.N_c_out},
          {"expected_charts", r.expected_charts},
          {"chart_count_match", r.chart_count_match},
          {"adjacency_isomorphic", r.adjacency_isomorphic},
          {"S_l_in", r.S_l_in},
          {"S_l_out", r.S_l_out},
          {"density", r.density},
          {"densified", r.densified},
          {"non_quad_faces", r.non_quad_faces},
          {"refined_faces", r.refined_faces},
          {"subdivision_levels", r.subdivision_levels},
          {"d_h", r.hausdorff},
          {"surface_faces", r.surface_faces},
          {"attempts", attempts},
          {"success", r.success()},
          {"error", r.error}};
}

RoundTripReport round_trip(const Mesh& quad, const PipelineConfig& config, RoundTripArtifacts* artifacts) {
  if (!quad.is_pure_quad()) throw InputError("round trip: quad mesh required");
  RoundTripReport rep;
  const BaseComplex complex = build_base_complex_with_features(quad);
  const ChartSplit split = split_quad_mesh(quad);
  rep.N_c_in = complex.num_charts();
  rep.S_l_in = loop_simplicity(quad, &complex).S_l;

  const Mesh surface = isotropic_remesh(triangulate_quads(quad, config.seed), config.remesh);
  rep.surface_faces = surface.num_faces();
  if (artifacts) artifacts->surface = surface;

  BakeOptions bake = config.bake;
  bake.site = BakeSite::FaceCenters;
  bake.seed = config.seed;
  const int first = std::clamp(bake.density, 0, std::max(config.max_density, 0));
  for (int density = first; density <= std::max(config.max_density, first); ++density) {
    const bool last = density == std::max(config.max_density, first);
    bake.density = density;
    auto field = bake_fields(split, surface, bake);
    add_cdf_noise(field, config.noise, config.seed);
    RoundTripAttempt attempt;
    attempt.density = density;
    Extraction ex;
    try {
      ex = extract_from_field(surface, field, config, false);
    } catch (const LayoutError& e) {
      attempt.outcome = std::string("layout error: ") + e.what();
      rep.attempts.push_back(attempt);
      if (last) rep.error = attempt.outcome;
      continue;
    }
    attempt.seeds = static_cast<int>(ex.seeds.size());
    attempt.clusters = ex.partition.num_clusters();
    attempt.merges = ex.partition.merges;
    if (!last && ex.extract_report.split_clusters > 0) {
      attempt.outcome = "split a non-disk cluster";
      rep.attempts.push_back(attempt);
      continue;
    }
    if (!last && ex.layout.num_non_quads() > 0) {
      attempt.outcome = "non-quad faces after collapse";
      rep.attempts.push_back(attempt);
      continue;
    }
    rep.attempts.push_back(attempt);

    rep.density = density;
    rep.densified = density > 0;
    const Graph expected = density == 0 ? chart_graph(complex) : densified_graph(split, density);
    rep.expected_charts = expected.nodes;
    rep.N_c_out = ex.layout.num_faces();
    rep.chart_count_match = rep.N_c_out == rep.expected_charts;
    rep.non_quad_faces = ex.layout.num_non_quads();
    try {
      rep.adjacency_isomorphic = isomorphic(face_graph(ex.layout.to_mesh()), expected);
    } catch (const NonManifoldError&) {
      rep.adjacency_isomorphic = false;
    }
    ex.refined = refine(ex.layout, surface, config.refine, &ex.refine_report);
    rep.refined_faces = ex.refined.num_faces();
    rep.subdivision_levels = ex.refine_report.levels;
    rep.S_l_out = loop_simplicity(ex.refined).S_l;
    rep.hausdorff = hausdorff(ex.refined, quad, config.hausdorff_samples, config.seed);
    if (artifacts) {
      artifacts->field = std::move(field);
      artifacts->extraction = std::move(ex);
    }
    break;
  }
  return rep;
}

}  // namespace quadkit
