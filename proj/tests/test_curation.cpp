#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include "quadkit/base_complex.hpp"
#include "quadkit/curation.hpp"
#include "quadkit/pipeline.hpp"
#include "quadkit/refine.hpp"
#include "quadkit/shapes.hpp"
#include "support.hpp"

using namespace quadkit;
using namespace quadkit::testing;

namespace {

// Largest vertex mismatch between two meshes with the same vertex order, minimized over
// the eight axis sign flips.
double distance_up_to_flips(const Mesh& a, const Mesh& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < 8; ++mask) {
    const Vec3 s((mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1);
    double worst = 0.0;
    for (int v = 0; v < a.num_vertices(); ++v) {
      worst = std::max(worst, (a.position(v).cwiseProduct(s) - b.position(v)).norm());
    }
    best = std::min(best, worst);
  }
  return best;
}

double signed_volume(const Mesh& m) {
  double vol = 0.0;
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto vs = m.face_vertices(f);
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
      vol += m.position(vs[0]).dot(m.position(vs[i]).cross(m.position(vs[i + 1]))) / 6.0;
    }
  }
  return vol;
}

// Random edge-manifold polycube with clearly separated area-weighted principal variances and
// skewed marginals, so its canonical frame is unique up to the handled sign flips.
Mesh random_polycube(std::mt19937_64& rng) {
  for (;;) {
    std::set<std::array<int, 3>> cells{{0, 0, 0}};
    std::uniform_int_distribution<int> pick(0, 5);
    const int count = 4 + static_cast<int>(rng() % 5);
    while (static_cast<int>(cells.size()) < count) {
      auto it = cells.begin();
      std::advance(it, rng() % cells.size());
      auto c = *it;
      const int d = pick(rng);
      c[d / 2] += (d % 2) ? 1 : -1;
      cells.insert(c);
    }
    Mesh m;
    try {
      m = polycube({cells.begin(), cells.end()}, 1);
    } catch (const NonManifoldError&) {
      continue;
    }
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    Vec3 mean = Vec3::Zero();
    for (const auto& p : m.positions()) mean += p;
    mean /= m.num_vertices();
    for (const auto& p : m.positions()) cov += (p - mean) * (p - mean).transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov / m.num_vertices());
    const auto ev = eig.eigenvalues();
    if (ev[1] - ev[0] > 0.05 * ev[2] && ev[2] - ev[1] > 0.05 * ev[2]) {
      const Mesh n = normalize(m);
      bool skewed = true;
      for (int k = 0; k < 3; ++k) {
        double skew = 0.0;
        for (const auto& p : n.positions()) skew += p[k] * p[k] * p[k];
        skewed = skewed && std::abs(skew) > 1e-3 * n.num_vertices();
      }
      if (skewed) return m;
    }
  }
}

CurationMeasures passing() {
  CurationMeasures m;
  m.S_l = 1.0;
  m.N_c = 6;
  m.min_chart_area = 4.0;
  m.min_chart_side = 2.0;
  m.max_non_planarity = 0.0;
  m.boundaries = 0;
  m.interior_singularities = 8;
  return m;
}

CurationVerdict verdict_of(const Mesh& raw) {
  const Mesh m = normalize(raw);
  const BaseComplex bc = build_base_complex_with_features(m);
  return filter_mesh(m, bc, loop_simplicity(m, &bc));
}

DedupItem item(int id, const Mesh& m) {
  return {id, &m, fingerprint(m, build_base_complex_with_features(m))};
}

}  // namespace

TEST_CASE("normalize puts the longest axis of a 2x1x1 box on [-1,1]") {
  const Mesh n = normalize(box(2, 1, 1, 1));
  const BBox b = n.bbox();
  CHECK(b.lo.x() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(b.hi.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.hi.y() - b.lo.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.hi.z() - b.lo.z() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize keeps outward orientation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh m = random_polycube(rng);
    CHECK(signed_volume(m) > 0.0);
    CHECK(signed_volume(normalize(m)) > 0.0);
  }
}

TEST_CASE("property: normalize ignores rigid motion and scale up to axis flips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Mesh m = random_polycube(rng);
    const Mesh moved = transformed(m, random_rotation(rng()), 0.1 + std::abs(u(rng)), Vec3(u(rng), u(rng), u(rng)));
    const Mesh a = normalize(m), b = normalize(moved);
    CHECK(distance_up_to_flips(a, b) < 1e-9);
    const BBox box = a.bbox();
    CHECK(box.lo.minCoeff() >= -1.0 - 1e-12);
    CHECK(box.hi.maxCoeff() <= 1.0 + 1e-12);
    CHECK((box.hi - box.lo).maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("property: normalize is idempotent up to axis flips") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Mesh a = normalize(random_polycube(rng));
    CHECK(distance_up_to_flips(normalize(a), a) < 1e-9);
  }
}

TEST_CASE("normalize rejects coincident vertices") {
  const Mesh m = Mesh::from_polygons({Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)}, {{0, 1, 2, 3}},
                                     BuildOptions{.degenerate_area = -1});
  CHECK_THROWS_AS(normalize(m), InputError);
}

TEST_CASE("quad non-planarity is the lifted corner's height over the mean edge") {
  const double h = 0.3;
  const Mesh m = Mesh::from_polygons({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, h)}, {{0, 1, 2, 3}});
  const double mean_edge = (2.0 + 2.0 * std::sqrt(1.0 + h * h)) / 4.0;
  CHECK(quad_non_planarity(m, 0) == doctest::Approx(h / mean_edge).epsilon(1e-12));
  CHECK(quad_non_planarity(grid_patch(2, 2), 0) == 0.0);
}

TEST_CASE("thresholds fire with exact boundary semantics") {
  struct Case {
    const char* reason;
    void (*edit)(CurationMeasures&);
    bool keep;
  };
  const Case cases[] = {
      {"", [](CurationMeasures&) {}, true},
      {"", [](CurationMeasures& m) { m.S_l = 0.618; }, true},
      {"simplicity", [](CurationMeasures& m) { m.S_l = std::nextafter(0.618, 0.0); }, false},
      {"simplicity", [](CurationMeasures& m) { m.S_l = 0.5; }, false},
      {"", [](CurationMeasures& m) { m.max_non_planarity = 0.5; }, true},
      {"planarity", [](CurationMeasures& m) { m.max_non_planarity = std::nextafter(0.5, 1.0); }, false},
      {"", [](CurationMeasures& m) { m.N_c = 1024; }, true},
      {"chart-count", [](CurationMeasures& m) { m.N_c = 1025; }, false},
      {"", [](CurationMeasures& m) { m.min_chart_area = 1.0 / 1024.0; }, true},
      {"chart-area", [](CurationMeasures& m) { m.min_chart_area = std::nextafter(1.0 / 1024.0, 0.0); }, false},
      {"", [](CurationMeasures& m) { m.min_chart_side = std::sqrt(1.0 / 1024.0); }, true},
      {"chart-side", [](CurationMeasures& m) { m.min_chart_side = std::nextafter(std::sqrt(1.0 / 1024.0), 0.0); }, false},
      {"", [](CurationMeasures& m) { m.boundaries = 8; }, true},
      {"boundaries", [](CurationMeasures& m) { m.boundaries = 9; }, false},
      {"trivial-layout", [](CurationMeasures& m) { m.boundaries = 1, m.interior_singularities = 0; }, false},
      {"", [](CurationMeasures& m) { m.boundaries = 1, m.interior_singularities = 1; }, true},
      {"", [](CurationMeasures& m) { m.boundaries = 0, m.interior_singularities = 0; }, true},
  };
  for (const auto& c : cases) {
    CurationMeasures m = passing();
    c.edit(m);
    const CurationVerdict v = judge(m);
    CAPTURE(c.reason);
    CHECK(v.keep == c.keep);
    CHECK(v.reason == c.reason);
    CHECK(v.checks.size() == 7);
    const bool all_pass = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& k) { return k.pass; });
    CHECK(all_pass == v.keep);
  }
}

TEST_CASE("the first failing check in order is the reason") {
  CurationMeasures m = passing();
  m.N_c = 2000;
  m.boundaries = 20;
  m.S_l = 0.1;
  const CurationVerdict v = judge(m);
  CHECK(v.reason == "simplicity");
  int failing = 0;
  for (const auto& c : v.checks) failing += c.pass ? 0 : 1;
  CHECK(failing == 3);
}

TEST_CASE("property: judge is a pure function of the measures") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    CurationMeasures m;
    m.S_l = u(rng);
    m.N_c = static_cast<int>(rng() % 2048);
    m.min_chart_area = u(rng) * 0.002;
    m.min_chart_side = u(rng) * 0.06;
    m.max_non_planarity = u(rng);
    m.boundaries = static_cast<int>(rng() % 12);
    m.interior_singularities = static_cast<int>(rng() % 3);
    const auto a = judge(m), b = judge(m);
    CHECK(verdict_json(a) == verdict_json(b));
    const bool expected = m.S_l >= 0.618 && m.max_non_planarity <= 0.5 && m.N_c <= 1024 &&
                          m.min_chart_area >= 1.0 / 1024 && m.min_chart_side >= 1.0 / 32 && m.boundaries <= 8 &&
                          (m.boundaries == 0 || m.interior_singularities > 0);
    CHECK(a.keep == expected);
  }
}

TEST_CASE("filter on real meshes") {
  SUBCASE("spiralling tube is rejected for simplicity") {
    const auto v = verdict_of(helical_cylinder(12, 2, 1.0, 0.5));
    CHECK(v.measured.S_l == doctest::Approx(0.5));
    CHECK(v.reason == "simplicity");
  }
  SUBCASE("open grid has no singularities") {
    const auto v = verdict_of(grid_patch(8, 8));
    CHECK(v.measured.S_l == 1.0);
    CHECK(v.reason == "trivial-layout");
  }
  SUBCASE("cube with 2x2 faces is kept") {
    const auto v = verdict_of(cube(2));
    CHECK(v.keep);
    CHECK(v.measured.S_l == 1.0);
    CHECK(v.measured.N_c == 6);
    CHECK(v.measured.boundaries == 0);
    CHECK(v.measured.interior_singularities == 8);
    // The normalized cube is [-1,1]^3 again: faces of area 4 and sides of length 2.
    CHECK(v.measured.min_chart_area == doctest::Approx(4.0));
    CHECK(v.measured.min_chart_side == doctest::Approx(2.0));
  }
}

TEST_CASE("dedup drops copies and jittered copies, keeps subdivisions") {
  const Mesh a = normalize(cube(2));
  const Mesh copy = a;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jitter(-1e-5, 1e-5);
  std::vector<Vec3> moved = a.positions();
  for (auto& p : moved) p += Vec3(jitter(rng), jitter(rng), jitter(rng));
  const Mesh jittered = a.with_positions(moved);
  const Mesh finer = normalize(midpoint_subdivide(cube(2)));

  const double measured = chamfer_distance(a, jittered);
  CHECK(measured > 0.0);
  CHECK(measured < 1e-3);
  CHECK(fingerprint(a, build_base_complex_with_features(a)) ==
        fingerprint(jittered, build_base_complex_with_features(jittered)));

  const auto dup = dedup({item(0, a), item(1, copy), item(2, jittered), item(3, finer)});
  CHECK(dup == std::vector<int>{-1, 0, 0, -1});
}

TEST_CASE("dedup keeps shapes that share connectivity but not geometry") {
  const Mesh a = normalize(cube(2));
  std::vector<Vec3> stretched = cube(2).positions();
  for (auto& p : stretched) p.x() *= 2.0;
  const Mesh b = normalize(cube(2).with_positions(stretched));
  CHECK(fingerprint(a, build_base_complex_with_features(a)) == fingerprint(b, build_base_complex_with_features(b)));
  CHECK(chamfer_distance(a, b) > 1e-3);
  CHECK(dedup({item(0, a), item(1, b)}) == std::vector<int>{-1, -1});
}

TEST_CASE("property: dedup keeps the same set for any input order") {
  std::mt19937_64 rng(21);
  std::vector<Mesh> meshes;
  for (int i = 0; i < 4; ++i) {
    const Mesh m = normalize(random_polycube(rng));
    meshes.push_back(m);
    meshes.push_back(m);
  }
  meshes.push_back(normalize(cube(2)));
  std::vector<DedupItem> items;
  for (size_t i = 0; i < meshes.size(); ++i) items.push_back(item(static_cast<int>(i), meshes[i]));

  auto kept_ids = [](const std::vector<DedupItem>& list) {
    const auto dup = dedup(list);
    std::set<int> kept;
    for (size_t i = 0; i < list.size(); ++i) {
      if (dup[i] < 0) kept.insert(list[i].id);
    }
    return kept;
  };
  const auto reference = kept_ids(items);
  for (int id : reference) CHECK((id % 2 == 0 || id == 8));
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(items.begin(), items.end(), rng);
    CHECK(kept_ids(items) == reference);
  }
}
