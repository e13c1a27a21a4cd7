#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include <json.hpp>

#include "cli_runner.hpp"
#include "quadkit/chart_fields.hpp"
#include "quadkit/field_io.hpp"
#include "quadkit/mesh_io.hpp"
#include "quadkit/pipeline.hpp"
#include "quadkit/shapes.hpp"
#include "support.hpp"

using namespace quadkit;
using namespace quadkit::testing;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json parse(const CliResult& r) {
  INFO(r.err);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

fs::path fixture(const fs::path& dir, const std::string& name, const Mesh& mesh) {
  write_obj(dir / name, mesh);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("metrics reports loop simplicity and charts") {
  const auto dir = scratch_dir("cli_metrics");
  SUBCASE("grid patch") {
    const json j = parse(run_cli({"metrics", fixture(dir, "grid.obj", grid_patch(6, 4)).string()}, dir));
    CHECK(j["S_l"] == 1.0);
    CHECK(j["S_fl"] == 1.0);
    CHECK(j["S_el"] == 1.0);
    CHECK(j["N_c"] == 1);
    CHECK(j["d_h"].is_null());
    CHECK(j["topology"]["boundaries"] == 1);
  }
  SUBCASE("cube with 2x2 faces") {
    const json j = parse(run_cli({"metrics", fixture(dir, "cube.obj", cube(2)).string()}, dir));
    CHECK(j["N_I"] == 8);
    CHECK(j["N_c"] == 6);
    CHECK(j["SJ_min"] == doctest::Approx(1.0));
    CHECK(j["topology"]["genus"] == 0);
  }
  SUBCASE("reference gives a Hausdorff distance") {
    const auto a = fixture(dir, "cube.obj", cube(2));
    const json j = parse(run_cli({"metrics", a.string(), "--reference", a.string()}, dir));
    CHECK(j["d_h"].get<double>() < 1e-9);
  }
  SUBCASE("triangle input is an input error") {
    write_text(dir / "tri.obj", cube_obj(true));
    const auto r = run_cli({"metrics", "tri.obj"}, dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("quad mesh required") != std::string::npos);
  }
  SUBCASE("missing file is an input error") {
    CHECK(run_cli({"metrics", "nowhere.obj"}, dir).code == 2);
  }
}

TEST_CASE("bake writes fields and colors") {
  const auto dir = scratch_dir("cli_bake");
  const auto quad = fixture(dir, "cube.obj", cube(2));
  SUBCASE("auto-remeshed cube has six maxima") {
    const json j = parse(run_cli({"bake", quad.string(), "--field", "f.json", "--ply", "f.ply", "--surface", "s.obj"}, dir));
    CHECK(j["maxima"] == 6);
    const auto field = read_fields(dir / "f.json");
    const Mesh surface = load_mesh(dir / "s.obj").mesh;
    CHECK(static_cast<int>(field.size()) == surface.num_faces());
    CHECK(j["target_faces"] == surface.num_faces());
    CHECK(fs::file_size(dir / "f.ply") > 0);
  }
  SUBCASE("identity bake matches direct evaluation") {
    const json j = parse(run_cli({"bake", quad.string(), "--target", quad.string(), "--site", "vertices", "--field", "f.bin"}, dir));
    const Mesh mesh = load_mesh(quad).mesh;
    const ChartSplit split = split_quad_mesh(mesh);
    const auto field = read_fields(dir / "f.bin");
    REQUIRE(static_cast<int>(field.size()) == mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) CHECK(field[v].cdf == eval_cdf(split, mesh.position(v)));
    CHECK(j["maxima"].is_null());
  }
  SUBCASE("far target is rejected with the offending indices") {
    std::vector<Vec3> far = cube(2).positions();
    for (auto& p : far) p += Vec3(10, 0, 0);
    fixture(dir, "far.obj", cube(2).with_positions(far));
    const auto r = run_cli({"bake", quad.string(), "--target", "far.obj"}, dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("indices") != std::string::npos);
  }
}

TEST_CASE("roundtrip reproduces layouts") {
  const auto dir = scratch_dir("cli_roundtrip");
  SUBCASE("cube with 2x2 faces") {
    const auto r = run_cli({"roundtrip", fixture(dir, "cube.obj", cube(2)).string(), "--check", "--dump", "out"}, dir);
    const json j = parse(r);
    CHECK(j["N_c_in"] == 6);
    CHECK(j["N_c_out"] == 6);
    CHECK(j["adjacency_isomorphic"] == true);
    CHECK(j["S_l_in"] == 1.0);
    CHECK(j["S_l_out"] == 1.0);
    CHECK(j["densified"] == false);
    for (const char* f : {"surface.obj", "field.json", "field.ply", "clusters.ply", "layout.obj", "refined.obj"}) {
      CHECK(fs::exists(dir / "out" / f));
    }
  }
  SUBCASE("grid patch") {
    const json j = parse(run_cli({"roundtrip", fixture(dir, "grid.obj", grid_patch(8, 8)).string()}, dir));
    CHECK(j["N_c_in"] == 1);
    CHECK(j["N_c_out"] == j["expected_charts"]);
    CHECK(j["adjacency_isomorphic"] == true);
    CHECK(j["S_l_out"] == 1.0);
  }
  SUBCASE("single-chart closed surface takes the densify path") {
    const json j = parse(run_cli({"roundtrip", fixture(dir, "torus.obj", torus(24, 12)).string()}, dir));
    CHECK(j["N_c_in"] == 1);
    CHECK(j["densified"] == true);
    CHECK(j["density"] == 2);
    CHECK(j["expected_charts"] == 16);
    CHECK(j["N_c_out"] == 16);
    CHECK(j["adjacency_isomorphic"] == true);
    CHECK(j["attempts"].size() == 3);
    CHECK(j["attempts"][0]["outcome"] != "");
  }
  SUBCASE("check mode fails when densifying is not allowed") {
    write_text(dir / "nodensify.json", R"({"extract": {"max_density": 0}})");
    const auto r = run_cli({"--config", "nodensify.json", "roundtrip", fixture(dir, "torus.obj", torus(24, 12)).string(), "--check"}, dir);
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["success"] == false);
  }
}

TEST_CASE("tri2quad recovers a triangulated grid") {
  const auto dir = scratch_dir("cli_tri2quad");
  const auto tri = fixture(dir, "tri.obj", triangulate_quads(grid_patch(6, 6), 3));
  const json j = parse(run_cli({"tri2quad", tri.string(), "--obj", "quads.obj"}, dir));
  CHECK(j["input_tris"] == 72);
  CHECK(j["quads"] == 36);
  CHECK(j["remaining_tris"] == 0);
  CHECK(j["purity"] == 100.0);
  CHECK(load_mesh(dir / "quads.obj").mesh.is_pure_quad());
  CHECK(run_cli({"tri2quad", fixture(dir, "quad.obj", grid_patch(2, 2)).string()}, dir).code == 2);
}

TEST_CASE("curate marks rejects and duplicates") {
  const auto dir = scratch_dir("cli_curate");
  fs::create_directories(dir / "in");
  fixture(dir / "in", "a_bracket.obj", l_bracket(2));
  fixture(dir / "in", "b_star.obj", star_patch(5, 4));
  fixture(dir / "in", "c_helix.obj", helical_cylinder(12, 2, 1.0, 0.5));
  SUBCASE("one of three fails simplicity") {
    const json j = parse(run_cli({"curate", "in", "--histogram", "hist.csv"}, dir));
    CHECK(j["kept"] == 2);
    CHECK(j["rejected"] == 1);
    CHECK(j["meshes"][2]["path"] == "c_helix.obj");
    CHECK(j["meshes"][2]["reason"] == "simplicity");
    CHECK(j["meshes"][2]["measured"]["S_l"] == doctest::Approx(0.5));
    const std::string csv = read_file(dir / "hist.csv");
    CHECK(csv.rfind("metric,bin_lo,bin_hi,count\n", 0) == 0);
  }
  SUBCASE("a moved copy is a duplicate of the first") {
    // The bracket's principal axes are distinct, so normalization undoes the motion.
    fixture(dir / "in", "d_bracket_moved.obj", transformed(l_bracket(2), random_rotation(3), 2.5, Vec3(1, 2, 3)));
    write_text(dir / "in" / "e_broken.obj", "v 0 0 0\nf 1 2 3\n");
    const json j = parse(run_cli({"--jobs", "3", "curate", "in"}, dir));
    CHECK(j["duplicates"] == 1);
    CHECK(j["meshes"][3]["duplicate_of"] == "a_bracket.obj");
    CHECK(j["unreadable"] == 1);
    CHECK(j["meshes"][4]["reason"] == "unreadable");
  }
}

TEST_CASE("extract from a baked field") {
  const auto dir = scratch_dir("cli_extract");
  const auto quad = fixture(dir, "cube.obj", cube(2));
  parse(run_cli({"bake", quad.string(), "--field", "f.json", "--surface", "s.obj"}, dir));
  const json j = parse(run_cli({"extract", "f.json", "s.obj", "--layout", "l.obj", "--refined", "r.obj", "--clusters", "c.ply"}, dir));
  CHECK(j["clusters"] == 6);
  CHECK(j["non_quad_faces"] == 0);
  CHECK(j["subdivision_levels"].get<int>() >= 1);
  CHECK(load_mesh(dir / "l.obj").mesh.num_faces() == 6);
  CHECK(load_mesh(dir / "r.obj").mesh.is_pure_quad());
  CHECK(run_cli({"extract", "missing.json", "s.obj"}, dir).code == 2);
}

TEST_CASE("config dumps, loads and honours the environment") {
  const auto dir = scratch_dir("cli_config");
  REQUIRE(run_cli({"config", "-o", "a.json"}, dir).code == 0);
  REQUIRE(run_cli({"--config", "a.json", "config", "-o", "b.json"}, dir).code == 0);
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));

  write_text(dir / "seven.json", R"({"seed": 7, "refine": {"max_subdiv": 2}})");
  json j = parse(run_cli({"config"}, dir, "QUADKIT_CONFIG=seven.json"));
  CHECK(j["seed"] == 7);
  CHECK(j["refine"]["max_subdiv"] == 2);
  j = parse(run_cli({"--seed", "3", "config"}, dir, "QUADKIT_CONFIG=seven.json"));
  CHECK(j["seed"] == 3);

  write_text(dir / "typo.json", R"({"refine": {"max_subdivs": 2}})");
  const auto r = run_cli({"--config", "typo.json", "config"}, dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("refine.max_subdivs") != std::string::npos);
}

TEST_CASE("config survives a JSON round trip") {
  PipelineConfig c;
  c.seed = 42;
  c.remesh.target = 0.02;
  c.bake.site = BakeSite::Vertices;
  c.cluster.use_dual = true;
  c.max_density = 1;
  c.refine.smooth = false;
  c.curation.max_charts = 10;
  c.noise = 0.05;
  const json once = to_json(c);
  CHECK(to_json(config_from_json(once)) == once);
  CHECK(to_json(config_from_json(json::object())) == to_json(PipelineConfig{}));
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = scratch_dir("cli_usage");
  CHECK(run_cli({}, dir).code == 2);
  CHECK(run_cli({"frobnicate"}, dir).code == 2);
  CHECK(run_cli({"--help"}, dir).code == 0);
}

TEST_CASE("same seed, same bytes") {
  const auto dir = scratch_dir("cli_determinism");
  const auto quad = fixture(dir, "cube.obj", cube(2)).string();
  const auto tri = fixture(dir, "tri.obj", triangulate_quads(cube(3), 1)).string();
  fs::create_directories(dir / "in");
  fixture(dir / "in", "a.obj", cube(2));
  fixture(dir / "in", "b.obj", helical_cylinder(12, 2, 1.0, 0.5));
  parse(run_cli({"bake", quad, "--field", "f.json", "--surface", "s.obj"}, dir));

  const std::vector<std::vector<std::string>> commands = {
      {"--seed", "5", "metrics", quad, "--reference", "s.obj"},
      {"--seed", "5", "bake", quad, "--site", "samples"},
      {"--seed", "5", "roundtrip", quad, "--noise", "0.05"},
      {"--seed", "5", "tri2quad", tri},
      {"--seed", "5", "--jobs", "2", "curate", "in"},
      {"--seed", "5", "extract", "f.json", "s.obj"},
  };
  for (const auto& args : commands) {
    const auto first = run_cli(args, dir), second = run_cli(args, dir);
    CAPTURE(args[2]);
    CHECK(first.code == 0);
    CHECK(!first.out.empty());
    CHECK(first.out == second.out);
  }
}
