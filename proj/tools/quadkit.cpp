#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadkit/base_complex.hpp"
#include "quadkit/clustering.hpp"
#include "quadkit/curation.hpp"
#include "quadkit/field_io.hpp"
#include "quadkit/mesh_io.hpp"
#include "quadkit/pipeline.hpp"
#include "quadkit/shapes.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace quadkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGate = 1;
constexpr int kExitInput = 2;

struct Globals {
  std::optional<uint64_t> seed;
  std::string config_path;
  int jobs = 1;
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig config;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("QUADKIT_CONFIG")) path = env;
  }
  if (!path.empty()) config = load_config(path);
  if (g.seed) {
    config.seed = *g.seed;
    config.bake.seed = *g.seed;
    config.dedup.seed = *g.seed;
  }
  return config;
}

void emit(const json& report, const std::string& out) {
  if (out.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw InputError("cannot write " + out);
  f << report.dump(2) << "\n";
}

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be stored by index.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::clamp(jobs, 1, std::max(n, 1));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard guard(lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Mesh load_quad(const std::string& path) {
  LoadedMesh loaded = load_mesh(path);
  if (!loaded.mesh.is_pure_quad()) throw InputError(path + ": quad mesh required");
  return std::move(loaded.mesh);
}

int cmd_metrics(const Globals& g, const std::string& path, const std::string& reference, const std::string& out) {
  const PipelineConfig config = resolve_config(g);
  const Mesh mesh = load_quad(path);
  const BaseComplex complex = build_base_complex_with_features(mesh);
  const SimplicityReport report = loop_simplicity(mesh, &complex);
  std::optional<Mesh> ref;
  if (!reference.empty()) ref = load_mesh(reference).mesh;
  json j = metrics_json(mesh, complex, report, ref ? &*ref : nullptr, config.hausdorff_samples, config.seed);
  j["topology"] = topology_json(mesh, complex);
  emit(j, out);
  return kExitOk;
}

int cmd_bake(const Globals& g, const std::string& quad_path, const std::string& target_path, const std::string& out,
             const std::string& ply, const std::string& surface_out, std::optional<int> density,
             const std::string& site, const std::string& report_out) {
  PipelineConfig config = resolve_config(g);
  if (density) config.bake.density = *density;
  if (!site.empty()) {
    json j = to_json(config);
    j["bake"]["site"] = site;
    config = config_from_json(j);
  }
  const Mesh quad = load_quad(quad_path);
  const ChartSplit split = split_quad_mesh(quad);
  Mesh target = target_path.empty() ? isotropic_remesh(triangulate_quads(quad, config.seed), config.remesh)
                                    : load_mesh(target_path).mesh;
  const auto field = bake_fields(split, target, config.bake);
  if (!out.empty()) write_fields(out, field);
  if (!ply.empty()) write_field_ply(ply, target, field);
  if (!surface_out.empty()) write_obj(surface_out, target);

  double lo = 1.0, hi = 0.0;
  for (const auto& s : field) {
    lo = std::min(lo, s.cdf);
    hi = std::max(hi, s.cdf);
  }
  json j = {{"samples", field.size()},
            {"density", config.bake.density},
            {"target_faces", target.num_faces()},
            {"cdf_min", field.empty() ? 0.0 : lo},
            {"cdf_max", field.empty() ? 0.0 : hi},
            {"maxima", nullptr}};
  if (static_cast<int>(field.size()) == target.num_faces()) {
    std::vector<double> cdf;
    for (const auto& s : field) cdf.push_back(s.cdf);
    j["maxima"] = detect_seeds(target, cdf, config.seeds.rings).size();
  }
  emit(j, report_out);
  return kExitOk;
}

void dump_artifacts(const fs::path& dir, const RoundTripArtifacts& a, uint64_t seed) {
  fs::create_directories(dir);
  write_obj(dir / "surface.obj", a.surface);
  if (!a.field.empty()) {
    write_fields(dir / "field.json", a.field);
    write_field_ply(dir / "field.ply", a.surface, a.field);
  }
  if (a.extraction) {
    const auto& ex = *a.extraction;
    write_cluster_ply(dir / "clusters.ply", a.surface, ex.partition.face_cluster, seed);
    write_obj(dir / "layout.obj", ex.layout.positions, ex.layout.faces);
    write_obj(dir / "refined.obj", ex.refined);
  }
}

int cmd_roundtrip(const Globals& g, const std::string& path, const std::string& dump, std::optional<double> noise,
                  bool check, const std::string& out) {
  PipelineConfig config = resolve_config(g);
  if (noise) config.noise = *noise;
  const Mesh quad = load_quad(path);
  RoundTripArtifacts artifacts;
  const RoundTripReport report = round_trip(quad, config, dump.empty() ? nullptr : &artifacts);
  if (!dump.empty()) dump_artifacts(dump, artifacts, config.seed);
  emit(round_trip_json(report), out);
  return check && !report.success() ? kExitGate : kExitOk;
}

int cmd_tri2quad(const std::string& path, const std::string& obj_out, const std::string& out) {
  const LoadedMesh loaded = load_mesh(path);
  if (!loaded.mesh.is_pure_triangle()) throw InputError(path + ": triangle mesh required");
  Tri2QuadStats stats;
  const QuadDominantMesh result = tri_to_quad(loaded.mesh, &stats);
  if (!obj_out.empty()) write_obj(obj_out, result.positions, result.faces);
  emit(tri2quad_json(stats), out);
  return kExitOk;
}

int cmd_extract(const Globals& g, const std::string& field_path, const std::string& mesh_path,
                const std::string& layout_out, const std::string& refined_out, const std::string& clusters_out,
                const std::string& out) {
  const PipelineConfig config = resolve_config(g);
  if (!fs::exists(field_path)) throw InputError("missing field file " + field_path);
  const auto field = read_fields(field_path);
  const Mesh surface = load_mesh(mesh_path).mesh;
  Extraction ex;
  try {
    ex = extract_from_field(surface, field, config);
  } catch (const LayoutError& e) {
    std::cerr << "extract: " << e.what() << "\n";
    return kExitGate;
  }
  if (!layout_out.empty()) write_obj(layout_out, ex.layout.positions, ex.layout.faces);
  if (!refined_out.empty()) write_obj(refined_out, ex.refined);
  if (!clusters_out.empty()) write_cluster_ply(clusters_out, surface, ex.partition.face_cluster, config.seed);
  emit(extraction_json(ex), out);
  return kExitOk;
}

struct CurateEntry {
  std::string path;
  std::optional<Mesh> mesh;
  std::string error;
  ConnectivityFingerprint print;
  CurationVerdict verdict;
};

void write_histograms(const fs::path& path, const std::vector<CurateEntry>& entries) {
  std::vector<int> simplicity(20, 0);
  std::vector<int> charts(12, 0);
  for (const auto& e : entries) {
    if (!e.mesh) continue;
    const auto& m = e.verdict.measured;
    simplicity[std::clamp(static_cast<int>(m.S_l * 20.0), 0, 19)]++;
    int bin = 0;
    while (bin < 11 && (1 << (bin + 1)) <= m.N_c) ++bin;
    charts[bin]++;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  f << "metric,bin_lo,bin_hi,count\n";
  for (int i = 0; i < 20; ++i) f << "S_l," << i / 20.0 << "," << (i + 1) / 20.0 << "," << simplicity[i] << "\n";
  for (int i = 0; i < 12; ++i) f << "N_c," << (1 << i) << "," << (1 << (i + 1)) << "," << charts[i] << "\n";
}

int cmd_curate(const Globals& g, const std::string& dir, const std::string& out, const std::string& histogram) {
  const PipelineConfig config = resolve_config(g);
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
  std::vector<CurateEntry> entries;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    auto ext = item.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj" || ext == ".ply") {
      CurateEntry entry;
      entry.path = fs::relative(item.path(), dir).generic_string();
      entries.push_back(std::move(entry));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });

  parallel_for(static_cast<int>(entries.size()), g.jobs, [&](int i) {
    auto& e = entries[i];
    try {
      const Mesh mesh = normalize(load_quad((fs::path(dir) / e.path).string()));
      const BaseComplex complex = build_base_complex_with_features(mesh);
      const SimplicityReport report = loop_simplicity(mesh, &complex);
      e.verdict = filter_mesh(mesh, complex, report, config.curation);
      e.print = fingerprint(mesh, complex);
      e.mesh = mesh;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  });

  std::vector<DedupItem> items;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].mesh) items.push_back({static_cast<int>(i), &*entries[i].mesh, entries[i].print});
  }
  const auto duplicate_of = dedup(items, config.dedup);

  json records = json::array();
  int kept = 0, rejected = 0, duplicates = 0, failed = 0;
  size_t k = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    json r = {{"path", e.path}, {"id", i}};
    if (!e.mesh) {
      r["keep"] = false;
      r["reason"] = "unreadable";
      r["error"] = e.error;
      ++failed;
    } else {
      const int dup = duplicate_of[k++];
      r.update(verdict_json(e.verdict));
      r["duplicate_of"] = dup >= 0 ? json(entries[dup].path) : json(nullptr);
      if (dup >= 0) {
        r["keep"] = false;
        r["reason"] = "duplicate";
        ++duplicates;
      } else if (e.verdict.keep) {
        ++kept;
      } else {
        ++rejected;
      }
    }
    records.push_back(r);
  }
  const json manifest = {{"meshes", records},
                         {"kept", kept},
                         {"rejected", rejected},
                         {"duplicates", duplicates},
                         {"unreadable", failed},
                         {"thresholds", to_json(config)["curation"]}};
  if (!histogram.empty()) write_histograms(histogram, entries);
  emit(manifest, out);
  return kExitOk;
}

int cmd_corpus(const Globals& g, const std::string& write_dir, std::optional<double> noise, bool check,
               int min_success, const std::string& out) {
  PipelineConfig config = resolve_config(g);
  if (noise) config.noise = *noise;
  const auto corpus = desk_corpus();
  if (!write_dir.empty()) {
    fs::create_directories(write_dir);
    for (const auto& item : corpus) write_obj(fs::path(write_dir) / (item.name + ".obj"), item.mesh);
  }
  std::vector<RoundTripReport> reports(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), g.jobs,
               [&](int i) { reports[i] = round_trip(corpus[i].mesh, config); });
  json rows = json::array();
  int successes = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    json r = round_trip_json(reports[i]);
    r["name"] = corpus[i].name;
    rows.push_back(r);
    successes += reports[i].success();
  }
  emit({{"meshes", rows}, {"successes", successes}, {"total", corpus.size()}, {"noise", config.noise}}, out);
  return check && successes < min_success ? kExitGate : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadkit: quad layout metrics, chart fields and layout extraction"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for samplers, noise and palettes (default 0)");
  app.add_option("--config", g.config_path, "JSON config file (default: $QUADKIT_CONFIG)");
  app.add_option("--jobs", g.jobs, "Worker threads for batch commands")->check(CLI::PositiveNumber);

  std::string input, second, out, reference, target, ply, surface_out, site, dump, layout_out, refined_out,
      clusters_out, histogram, field_out, write_dir;
  std::optional<int> density;
  std::optional<double> noise;
  bool check = false;
  int min_success = 9;

  auto* metrics = app.add_subcommand("metrics", "Loop simplicity, chart count and quality of a quad mesh");
  metrics->add_option("mesh", input, "Quad mesh (OBJ or PLY)")->required();
  metrics->add_option("--reference", reference, "Mesh to measure the Hausdorff distance against");
  metrics->add_option("-o,--out", out, "Write the JSON report here instead of stdout");

  auto* bake = app.add_subcommand("bake", "Bake chart distance fields of a quad mesh onto a target surface");
  bake->add_option("quad", input, "Quad mesh defining the charts")->required();
  bake->add_option("--target", target, "Target surface (default: remeshed triangulation of the quad mesh)");
  bake->add_option("--field", field_out, "Field file (.json or binary)");
  bake->add_option("--ply", ply, "PLY colored by cdf");
  bake->add_option("--surface", surface_out, "Write the target surface as OBJ");
  bake->add_option("--density", density, "Densification level N (4^N charts per chart)");
  bake->add_option("--site", site, "Sample sites: faces, vertices or samples");
  bake->add_option("-o,--out", out, "Write the JSON summary here instead of stdout");

  auto* roundtrip = app.add_subcommand("roundtrip", "Bake, extract and refine a quad mesh, then compare layouts");
  roundtrip->add_option("quad", input, "Quad mesh")->required();
  roundtrip->add_option("--dump", dump, "Directory for intermediate surface, field, clusters, layout and result");
  roundtrip->add_option("--noise", noise, "Uniform cdf noise amplitude");
  roundtrip->add_flag("--check", check, "Exit 1 when the layout is not reproduced");
  roundtrip->add_option("-o,--out", out, "Write the JSON report here instead of stdout");

  auto* tri2quad = app.add_subcommand("tri2quad", "Merge a triangle mesh into a quad-dominant mesh");
  tri2quad->add_option("mesh", input, "Triangle mesh")->required();
  tri2quad->add_option("--obj", second, "Write the quad-dominant mesh as OBJ");
  tri2quad->add_option("-o,--out", out, "Write the JSON statistics here instead of stdout");

  auto* curate = app.add_subcommand("curate", "Normalize, deduplicate and filter a directory of quad meshes");
  curate->add_option("dir", input, "Directory searched recursively for OBJ and PLY files")->required();
  curate->add_option("--histogram", histogram, "CSV histograms of S_l and N_c");
  curate->add_option("-o,--out", out, "Write the JSON manifest here instead of stdout");

  auto* extract = app.add_subcommand("extract", "Extract a quad layout from a baked field on a surface");
  extract->add_option("field", input, "Field file with one sample per surface face")->required();
  extract->add_option("mesh", second, "Surface mesh the field was baked on")->required();
  extract->add_option("--layout", layout_out, "Layout OBJ");
  extract->add_option("--refined", refined_out, "Refined quad mesh OBJ");
  extract->add_option("--clusters", clusters_out, "PLY with faces colored by cluster");
  extract->add_option("-o,--out", out, "Write the JSON report here instead of stdout");

  auto* corpus = app.add_subcommand("corpus", "Round trip over the built-in desk corpus");
  corpus->add_option("--write", write_dir, "Also write the corpus meshes as OBJ into this directory");
  corpus->add_option("--noise", noise, "Uniform cdf noise amplitude");
  corpus->add_flag("--check", check, "Exit 1 when fewer than --min-success meshes round trip");
  corpus->add_option("--min-success", min_success, "Successes required by --check");
  corpus->add_option("-o,--out", out, "Write the JSON report here instead of stdout");

  auto* config = app.add_subcommand("config", "Print the effective configuration");
  config->add_option("-o,--out", out, "Write it here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*metrics) return cmd_metrics(g, input, reference, out);
    if (*bake) return cmd_bake(g, input, target, field_out, ply, surface_out, density, site, out);
    if (*roundtrip) return cmd_roundtrip(g, input, dump, noise, check, out);
    if (*tri2quad) return cmd_tri2quad(input, second, out);
    if (*curate) return cmd_curate(g, input, out, histogram);
    if (*extract) return cmd_extract(g, input, second, layout_out, refined_out, clusters_out, out);
    if (*corpus) return cmd_corpus(g, write_dir, noise, check, min_success, out);
    if (*config) {
      emit(to_json(resolve_config(g)), out);
      return kExitOk;
    }
  } catch (const BakeDistanceError& e) {
    std::cerr << "error: " << e.what() << " (indices:";
    for (size_t i = 0; i < std::min<size_t>(e.indices().size(), 20); ++i) std::cerr << " " << e.indices()[i];
    std::cerr << ")\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
