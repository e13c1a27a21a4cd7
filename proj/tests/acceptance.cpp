// One PASS/FAIL line per acceptance criterion; the exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "cli_runner.hpp"
#include "quadkit/base_complex.hpp"
#include "quadkit/chart_fields.hpp"
#include "quadkit/curation.hpp"
#include "quadkit/loop_metrics.hpp"
#include "quadkit/loops.hpp"
#include "quadkit/mesh_io.hpp"
#include "quadkit/pipeline.hpp"
#include "quadkit/point_smoothing.hpp"
#include "quadkit/shapes.hpp"
#include "quadkit/tri2quad.hpp"
#include "support.hpp"

using namespace quadkit;
using namespace quadkit::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << std::endl;
}

// Metric exactness on grids and polycube-like meshes.
Outcome metric_exactness() {
  const std::vector<std::pair<std::string, Mesh>> meshes = {
      {"grid 1x1", grid_patch(1, 1)},     {"grid 7x3", grid_patch(7, 3)},   {"grid 20x20", grid_patch(20, 20)},
      {"cube 2x2", cube(2)},              {"cube 4x4", cube(4)},            {"box 3x2x1", box(3, 2, 1, 2)},
      {"l-bracket", l_bracket(2)},        {"polycube T", polycube({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 1, 0}}, 2)},
  };
  double slowest = 0.0;
  for (const auto& [name, m] : meshes) {
    const auto t0 = Clock::now();
    const BaseComplex bc = build_base_complex(m);
    const SimplicityReport r = loop_simplicity(m, &bc);
    const double secs = seconds_since(t0);
    slowest = std::max(slowest, secs);
    if (r.S_fl != 1.0 || r.S_el != 1.0 || r.S_l != 1.0) {
      return {false, name + " has S_fl " + std::to_string(r.S_fl) + ", S_el " + std::to_string(r.S_el)};
    }
    if (secs >= 1.0) return {false, name + " took " + std::to_string(secs) + " s"};
  }
  std::ostringstream s;
  s << meshes.size() << " meshes with S_fl = S_el = S_l = 1 exactly, slowest " << slowest << " s";
  return {true, s.str()};
}

// Total curvature of r = a + b t over `turns` turns by Simpson integration, in turns.
double spiral_turning(double turns, double a, double b) {
  auto integrand = [&](double t) {
    const double r = a + b * t;
    return (r * r + 2 * b * b) / (r * r + b * b);
  };
  const int n = 20000;
  const double end = 2.0 * kPi * turns, h = end / n;
  double s = integrand(0) + integrand(end);
  for (int i = 1; i < n; ++i) s += integrand(i * h) * (i % 2 ? 4 : 2);
  return s * h / 3.0 / (2.0 * kPi);
}

Outcome rotation_calibration() {
  std::vector<Vec3> circle;
  for (int i = 0; i < 64; ++i) circle.emplace_back(std::cos(2 * kPi * i / 64), std::sin(2 * kPi * i / 64), 0.0);
  std::vector<Vec3> line;
  for (int i = 0; i < 10; ++i) line.emplace_back(i, 2.0 * i, -i);
  const double a = 1.0, b = 0.1, turns = 2.5;
  std::vector<Vec3> spiral;
  for (int i = 0; i < 2000; ++i) {
    const double t = 2 * kPi * turns * i / 1999.0, r = a + b * t;
    spiral.emplace_back(r * std::cos(t), r * std::sin(t), 0.0);
  }
  const double oracle = spiral_turning(turns, a, b);
  const double c = rotation_index(circle, true), l = rotation_index(line, false), s = rotation_index(spiral, false);
  std::ostringstream d;
  d.precision(9);
  d << "circle " << c << ", line " << l << ", spiral " << s << " (oracle " << oracle << ")";
  return {std::abs(c - 1.0) <= 1e-6 && l == 0.0 && std::abs(s - 2.5) <= 0.05 && std::abs(s - oracle) <= 0.05,
          d.str()};
}

Outcome cdf_correctness() {
  const Mesh g = grid_patch(8, 8, 2.0, 2.0);
  auto pos = g.positions();
  for (auto& p : pos) p -= Vec3(1, 1, 0);
  const ChartSplit square = split_quad_mesh(g.with_positions(pos));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = U(rng), y = U(rng);
    worst = std::max(worst, std::abs(eval_cdf(square, Vec3(x, y, 0)) - (1 - std::max(std::abs(x), std::abs(y)))));
  }
  double boundary = 0.0;
  bool in_range = true;
  for (const auto& [name, mesh] : desk_corpus()) {
    const BaseComplex bc = build_base_complex_with_features(mesh);
    const ChartSplit split = split_charts(mesh, bc, assign_ring_lengths(mesh));
    BakeOptions opt;
    opt.site = BakeSite::Vertices;
    const auto at_vertices = bake_fields(split, mesh, opt);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (!bc.separatrix_edge[e]) continue;
      for (int v : {mesh.head(2 * e), mesh.tail(2 * e)}) boundary = std::max(boundary, at_vertices[v].cdf);
    }
    opt.site = BakeSite::Samples;
    opt.samples = 2000;
    auto samples = bake_fields(split, mesh, opt);
    samples.insert(samples.end(), at_vertices.begin(), at_vertices.end());
    for (const auto& s : samples) in_range = in_range && s.cdf >= 0.0 && s.cdf <= 1.0;
  }
  std::ostringstream d;
  d << "max |cdf - (1 - max(|x|,|y|))| = " << worst << " over 10k points; corpus boundary max " << boundary
    << ", range " << (in_range ? "ok" : "violated");
  return {worst <= 1e-9 && boundary < 1e-6 && in_range, d.str()};
}

double ray_hit(const Vec3& p, const Vec3& dir, const Vec3& a, const Vec3& b) {
  Eigen::Matrix<double, 3, 2> A;
  A.col(0) = b - a;
  A.col(1) = -dir;
  return A.colPivHouseholderQr().solve(p - a)(0);
}

Outcome subchart_oracle() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.3, 0.3), W(0.0, 1.0);
  double worst[2] = {0.0, 0.0};
  int counted[2] = {0, 0};
  for (int planar = 1; planar >= 0; --planar) {
    while (counted[planar] < 10000) {
      std::array<Vec3, 4> q{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
      for (auto& p : q) p += Vec3(U(rng), U(rng), planar ? 0.0 : U(rng));
      bool convex = true;
      for (int i = 0; i < 4; ++i) {
        const Vec3 e0 = q[(i + 1) % 4] - q[i], e1 = q[(i + 2) % 4] - q[(i + 1) % 4];
        convex = convex && e0.x() * e1.y() - e0.y() * e1.x() > 0.05;
      }
      if (!convex) continue;
      const int tri = counted[planar] % 2;
      double u = W(rng), v = W(rng);
      if (u + v > 1) u = 1 - u, v = 1 - v;
      const Vec3 p = tri == 0 ? q[0] + u * (q[1] - q[0]) + v * (q[2] - q[0]) : q[0] + u * (q[2] - q[0]) + v * (q[3] - q[0]);
      const auto got = subchart_coords(p, q, 0, 1, 0, 1);
      if (got.triangle != tri) continue;
      const double wx = tri == 0 ? ray_hit(p, q[2] - q[1], q[0], q[1]) : ray_hit(p, q[3] - q[0], q[3], q[2]);
      const double wy = tri == 0 ? ray_hit(p, q[1] - q[0], q[1], q[2]) : ray_hit(p, q[2] - q[3], q[0], q[3]);
      worst[planar] = std::max({worst[planar], std::abs(got.px - wx), std::abs(got.py - wy)});
      ++counted[planar];
    }
  }
  std::ostringstream d;
  d << "planar max error " << worst[1] << ", non-planar " << worst[0] << " over 10k queries each";
  return {worst[1] <= 1e-9 && worst[0] <= 1e-6, d.str()};
}

// Components of faces with value above `level`, faces sharing a vertex being connected.
int superlevel_regions(const Mesh& mesh, const std::vector<double>& value, double level) {
  std::vector<int> comp(mesh.num_faces(), -1);
  int count = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (comp[f] >= 0 || value[f] <= level) continue;
    std::vector<int> stack{f};
    comp[f] = count;
    while (!stack.empty()) {
      const int g = stack.back();
      stack.pop_back();
      for (int v : mesh.face_vertices(g)) {
        for (int n : mesh.vertex_faces(v)) {
          if (comp[n] < 0 && value[n] > level) {
            comp[n] = count;
            stack.push_back(n);
          }
        }
      }
    }
    ++count;
  }
  return count;
}

Outcome densification_count() {
  const Mesh target = triangulate_quads(grid_patch(50, 50), 9);
  const ChartSplit split = split_quad_mesh(grid_patch(8, 8));
  std::ostringstream d;
  bool ok = true;
  for (int N : {1, 2}) {
    BakeOptions opt;
    opt.density = N;
    std::vector<double> cdf;
    for (const auto& s : bake_fields(split, target, opt)) cdf.push_back(s.cdf);
    const int regions = superlevel_regions(target, cdf, 0.5);
    const int want = N == 1 ? 4 : 16;
    ok = ok && regions == want;
    d << (N == 1 ? "" : ", ") << "N=" << N << ": " << regions << " regions (want " << want << ")";
  }
  return {ok, d.str()};
}

struct CorpusRun {
  std::vector<std::string> names;
  std::vector<RoundTripReport> reports;
  double seconds = 0.0;
};

CorpusRun run_corpus(double noise) {
  CorpusRun run;
  PipelineConfig config;
  config.noise = noise;
  const auto t0 = Clock::now();
  for (const auto& [name, mesh] : desk_corpus()) {
    run.names.push_back(name);
    run.reports.push_back(round_trip(mesh, config));
  }
  run.seconds = seconds_since(t0);
  return run;
}

Outcome round_trip_corpus() {
  const CorpusRun run = run_corpus(0.0);
  int ok = 0;
  bool simple = true;
  std::string misses;
  for (size_t i = 0; i < run.reports.size(); ++i) {
    const auto& r = run.reports[i];
    if (r.chart_count_match && r.adjacency_isomorphic) {
      ++ok;
      simple = simple && r.S_l_out == 1.0;
    } else {
      misses += " " + run.names[i];
    }
  }
  std::ostringstream d;
  d << ok << "/" << run.reports.size() << " reproduced" << (misses.empty() ? "" : " (missed:" + misses + ")")
    << ", S_l = 1 on all successes: " << (simple ? "yes" : "no") << ", " << run.seconds << " s";
  return {ok >= 9 && simple && run.seconds < 300.0, d.str()};
}

Outcome noise_robustness() {
  const CorpusRun run = run_corpus(0.05);
  int ok = 0;
  std::string misses;
  for (size_t i = 0; i < run.reports.size(); ++i) {
    if (run.reports[i].chart_count_match) {
      ++ok;
    } else {
      misses += " " + run.names[i] + " (" + std::to_string(run.reports[i].N_c_out) + " vs " +
                std::to_string(run.reports[i].expected_charts) + ")";
    }
  }
  std::ostringstream d;
  d << ok << "/" << run.reports.size() << " keep their chart count under 0.05 cdf noise"
    << (misses.empty() ? "" : ", missed:" + misses);
  return {ok >= 8, d.str()};
}

Outcome tri2quad_recovery() {
  int runs = 0, recovered = 0, moved = 0;
  for (const auto& [name, mesh] : desk_corpus()) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const Mesh tri = triangulate_quads(mesh, seed);
      const QuadDominantMesh merged = merge_triangles(tri);
      const QuadDominantMesh out = loop_shift(tri, merged);
      ++runs;
      const bool same = out.positions.size() == mesh.positions().size() &&
                        std::memcmp(out.positions.data(), mesh.positions().data(), sizeof(Vec3) * out.positions.size()) == 0;
      if (!same) ++moved;
      if (same && out.num_triangles() == 0 && out.num_quads() == mesh.num_faces()) ++recovered;
    }
  }
  std::ostringstream d;
  d << recovered << "/" << runs << " runs recover the original quad count, " << moved << " with moved vertices";
  return {recovered >= 0.95 * runs && moved == 0, d.str()};
}

Eigen::MatrixXd dense_taubin(const std::vector<Vec3>& p, const std::vector<Vec3>& n, const TaubinOptions& o) {
  const int N = static_cast<int>(p.size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < N; ++j) {
      if (j != i) d.emplace_back((p[j] - p[i]).squaredNorm(), j);
    }
    std::sort(d.begin(), d.end());
    for (int k = 0; k < o.neighbors; ++k) {
      const int j = d[k].second;
      W(i, j) = std::exp(-(d[k].first + o.normal_weight * (n[j] - n[i]).squaredNorm()) / (o.bandwidth * d[0].first));
    }
  }
  const Eigen::VectorXd deg = W.rowwise().sum();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  const Eigen::MatrixXd L = deg.cwiseInverse().asDiagonal() * W - I;
  return (I + o.mu * L) * (I + o.lambda * L);
}

Outcome taubin_regularizer() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  std::vector<Vec3> pts, nrm;
  for (int j = 0; j < 30; ++j) {
    for (int i = 0; i < 30; ++i) pts.emplace_back(i + U(rng), j + U(rng), 0.1 * U(rng));
  }
  for (const auto& p : pts) nrm.push_back(Vec3(std::sin(p.x()), 0.3, 1.0).normalized());
  const TaubinOptions o;

  Eigen::MatrixXd constant(pts.size(), 3);
  constant.rowwise() = Eigen::RowVector3d(0.7, -2.5, 11.0);
  const double fixpoint = (regularize_point_signal(pts, nrm, constant, o) - constant).cwiseAbs().maxCoeff();

  std::normal_distribution<double> G;
  Eigen::MatrixXd noise(pts.size(), 4);
  for (int i = 0; i < noise.size(); ++i) noise.data()[i] = G(rng);
  const Eigen::MatrixXd A = dense_taubin(pts, nrm, o);
  Eigen::MatrixXd want = noise;
  for (int k = 0; k < o.iterations; ++k) want = A * want;
  const Eigen::MatrixXd got = regularize_point_signal(pts, nrm, noise, o);
  const double dense = (got - want).cwiseAbs().maxCoeff();
  const KnnGraph g = knn_graph(pts, nrm, o);
  const double before = dirichlet_energy(g, noise), after = dirichlet_energy(g, got);

  std::ostringstream d;
  d << pts.size() << " points: constant drift " << fixpoint << ", dense mismatch " << dense << ", energy " << before
    << " -> " << after;
  return {fixpoint <= 1e-12 && dense <= 1e-9 && after < before, d.str()};
}

Outcome curation_gates() {
  CurationMeasures base;
  base.S_l = 1.0;
  base.N_c = 6;
  base.min_chart_area = 4.0;
  base.min_chart_side = 2.0;
  base.boundaries = 0;
  base.interior_singularities = 8;
  struct Case {
    std::string reason;
    std::function<void(CurationMeasures&)> edit;
  };
  const std::vector<Case> cases = {
      {"", [](auto& m) { m.S_l = 0.618; }},
      {"simplicity", [](auto& m) { m.S_l = std::nextafter(0.618, 0.0); }},
      {"", [](auto& m) { m.max_non_planarity = 0.5; }},
      {"planarity", [](auto& m) { m.max_non_planarity = std::nextafter(0.5, 1.0); }},
      {"", [](auto& m) { m.N_c = 1024; }},
      {"chart-count", [](auto& m) { m.N_c = 1025; }},
      {"", [](auto& m) { m.min_chart_area = 1.0 / 1024; }},
      {"chart-area", [](auto& m) { m.min_chart_area = std::nextafter(1.0 / 1024, 0.0); }},
      {"", [](auto& m) { m.min_chart_side = std::sqrt(1.0 / 1024); }},
      {"chart-side", [](auto& m) { m.min_chart_side = std::nextafter(std::sqrt(1.0 / 1024), 0.0); }},
      {"", [](auto& m) { m.boundaries = 8; }},
      {"boundaries", [](auto& m) { m.boundaries = 9; }},
      {"trivial-layout", [](auto& m) { m.boundaries = 1, m.interior_singularities = 0; }},
      {"", [](auto& m) { m.boundaries = 1, m.interior_singularities = 1; }},
  };
  int right = 0;
  for (const auto& c : cases) {
    CurationMeasures m = base;
    c.edit(m);
    const CurationVerdict v = judge(m);
    if (v.reason == c.reason && v.keep == c.reason.empty()) ++right;
  }
  auto verdict = [](const Mesh& raw) {
    const Mesh m = normalize(raw);
    const BaseComplex bc = build_base_complex_with_features(m);
    return filter_mesh(m, bc, loop_simplicity(m, &bc));
  };
  const auto helix = verdict(helical_cylinder(12, 2, 1.0, 0.5));
  const auto grid = verdict(grid_patch(8, 8));
  const auto box = verdict(cube(2));
  const bool real = helix.reason == "simplicity" && grid.reason == "trivial-layout" && box.keep;
  std::ostringstream d;
  d << right << "/" << cases.size() << " constructed boundary cases, real meshes (S_l 0.5 tube, open grid, cube) "
    << (real ? "as expected" : "wrong");
  return {right == static_cast<int>(cases.size()) && real, d.str()};
}

Outcome cli_determinism() {
  const fs::path dir = scratch_dir("acceptance_determinism");
  write_obj(dir / "cube.obj", cube(2));
  write_obj(dir / "tri.obj", triangulate_quads(cube(3), 1));
  fs::create_directories(dir / "in");
  write_obj(dir / "in" / "a.obj", cube(2));
  write_obj(dir / "in" / "b.obj", helical_cylinder(12, 2, 1.0, 0.5));
  if (run_cli({"--seed", "5", "bake", "cube.obj", "--field", "f.json", "--surface", "s.obj"}, dir).code != 0) {
    return {false, "bake for the extract input failed"};
  }
  const std::vector<std::vector<std::string>> commands = {
      {"--seed", "5", "metrics", "cube.obj", "--reference", "s.obj"},
      {"--seed", "5", "bake", "cube.obj", "--site", "samples", "--field", "out.json"},
      {"--seed", "5", "roundtrip", "cube.obj", "--noise", "0.05"},
      {"--seed", "5", "tri2quad", "tri.obj", "--obj", "out.obj"},
      {"--seed", "5", "--jobs", "2", "curate", "in", "--histogram", "out.csv"},
      {"--seed", "5", "extract", "f.json", "s.obj", "--refined", "out.obj"},
      {"--seed", "5", "--jobs", "4", "corpus"},
      {"--seed", "5", "config"},
  };
  int same = 0;
  std::string differing;
  for (const auto& args : commands) {
    std::string outputs[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      const auto r = run_cli(args, dir);
      codes[k] = r.code;
      outputs[k] = r.out;
      for (const char* f : {"out.json", "out.obj", "out.csv"}) {
        if (fs::exists(dir / f)) {
          outputs[k] += read_file(dir / f);
          fs::remove(dir / f);
        }
      }
    }
    const std::string& cmd = args[args[2] == "--jobs" ? 4 : 2];
    if (codes[0] == 0 && codes[1] == 0 && !outputs[0].empty() && outputs[0] == outputs[1]) {
      ++same;
    } else {
      differing += " " + cmd;
    }
  }
  std::ostringstream d;
  d << same << "/" << commands.size() << " commands byte-identical across two runs"
    << (differing.empty() ? "" : " (differ:" + differing + ")");
  return {same == static_cast<int>(commands.size()), d.str()};
}

}  // namespace

int main() {
  report(1, "metric exactness", metric_exactness);
  report(2, "rotation index calibration", rotation_calibration);
  report(3, "cdf correctness", cdf_correctness);
  report(4, "subchart coordinate oracle", subchart_oracle);
  report(5, "densification count", densification_count);
  report(6, "round trip", round_trip_corpus);
  report(7, "noise robustness", noise_robustness);
  report(8, "tri2quad recovery", tri2quad_recovery);
  report(9, "taubin regularizer", taubin_regularizer);
  report(10, "curation gates", curation_gates);
  report(11, "determinism", cli_determinism);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures;
}
