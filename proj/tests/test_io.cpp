#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/io.hpp"
#include "helpers.hpp"

using namespace graphonlab;
using testutil::random_step;

TEST_CASE("step graphon JSON round trip is bit exact") {
  // the documented format
  auto w = step_from_json(Json::parse(
      R"({"measures": ["1/2","1/2"], "values": [["0","1"],["1","0"]]})"));
  CHECK(w->measure(0) == rat(1, 2));
  CHECK(w->block(0, 1) == Rational(1));

  for (uint64_t seed = 1; seed <= 8; ++seed) {
    auto orig = random_step(2 + int(seed % 4), seed, 997);  // awkward denominators
    auto back = step_from_json(step_to_json(*orig));
    REQUIRE(back->parts() == orig->parts());
    for (size_t i = 0; i < orig->parts(); ++i) {
      CHECK(back->measure(i) == orig->measure(i));
      for (size_t j = 0; j < orig->parts(); ++j) CHECK(back->block(i, j) == orig->block(i, j));
    }
    // serialized text is reproducible
    CHECK(step_to_json(*orig).dump() == step_to_json(*back).dump());
  }
}

TEST_CASE("density CSV rows") {
  DensityReport rep;
  rep.estimate = 0.125;
  rep.method = "exact";
  CHECK(density_csv_header() == "graph,estimate,std_error,samples,method");
  CHECK(density_csv_row("3:0-1", rep) == "3:0-1,0.125,0,0,exact");
}

TEST_CASE("kernel references") {
  CHECK(load_kernel("const:1/2")->value(0.3, 0.9) == 0.5);
  CHECK(load_kernel("half")->value(0.6, 0.6) == 1.0);
  CHECK(load_kernel("checker:2")->descriptor() == "checker(2)");
  CHECK(dynamic_cast<const StepGraphon*>(load_kernel("const:1/4").get()) != nullptr);
  CHECK_THROWS(load_kernel("/nonexistent/file.json"));
}

TEST_CASE("pgm rendering") {
  RunConfig cfg;
  cfg.resolution = 32;

  SECTION("grayscale polarity: 0 is white, 1 is black") {
    std::string black = render_pgm(*load_kernel("const:1"), 32, cfg);
    std::string white = render_pgm(*load_kernel("const:0"), 32, cfg);
    CHECK(black.substr(black.size() - 32 * 32) == std::string(32 * 32, char(0)));
    CHECK(white.substr(white.size() - 32 * 32) == std::string(32 * 32, char(255)));
  }

  SECTION("orientation: origin in the top left corner") {
    std::string img = render_pgm(*half_graphon(), 32, cfg);
    std::string px = img.substr(img.size() - 32 * 32);
    // top-left pixel is W(~0, ~0) = 0 -> white; bottom-right is W(~1, ~1) = 1 -> black
    CHECK((unsigned char)px[0] == 255);
    CHECK((unsigned char)px[32 * 32 - 1] == 0);
    // top-right: x near 1, y near 0: x + y just above 1 -> black
    CHECK((unsigned char)px[31] == 0);
  }

  SECTION("resolution floor") { CHECK_THROWS(render_pgm(*half_graphon(), 8, cfg)); }
}

TEST_CASE("manifest reconstruction") {
  auto wf = step_graphon({rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},
                         {{Rational(0), rat(1, 10), rat(1, 10), rat(1, 5)},
                          {rat(1, 10), rat(1, 5), rat(2, 5), rat(1, 2)},
                          {rat(1, 10), rat(2, 5), rat(7, 10), Rational(1)},
                          {rat(1, 5), rat(1, 2), Rational(1), rat(9, 10)}});
  auto norm = normalize_input(wf, rat(1, 3));
  auto reordered = monotone_reorder(norm.wf, 4 * (1 << norm.r));
  auto table = build_part_table(norm.r, reordered.q_measures);
  UniversalGraphon u = build_w0(reordered, table, mock_ckm(reordered.wf));

  Json manifest = manifest_to_json(u);
  UniversalGraphon u2 = universal_from_manifest(manifest);
  CHECK(u2.table().size() == u.table().size());
  CHECK(u2.epsilon == u.epsilon);
  CHECK(u2.rho == u.rho);
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    double x = rng.uniform();
    double y = rng.uniform();
    CHECK(u.pg.kernel->value(x, y) == u2.pg.kernel->value(x, y));
  }
  // identical manifests byte for byte
  CHECK(manifest.dump() == manifest_to_json(u2).dump());
}

TEST_CASE("verdict and certificate serialization") {
  RigidityVerdict v;
  v.verdict = "pullback-equal";
  v.t_c4_w1 = 0.125;
  v.t_c4_w2 = 0.125;
  Json j = verdict_to_json(v);
  CHECK(j["verdict"] == "pullback-equal");
  CHECK(j["t_c4_w1"] == 0.125);

  auto cert = forcing_experiment(3, 41);
  Json cj = certificate_to_json(cert);
  CHECK(cj["n"] == 3);
  CHECK(cj["m"] == 3);
  CHECK(cj["verdict"] == "not weakly isomorphic");
  CHECK(cj["densities_W"].size() == 7);
  // the graphons embed in the module-1 JSON format
  auto w_back = step_from_json(cj["W"]);
  CHECK(w_back->parts() == cert.w.w->parts());
}

TEST_CASE("rendered heatmap reads back the distinguishing column") {
  auto wf = step_graphon({rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},
                         {{Rational(0), rat(1, 10), rat(1, 10), rat(1, 5)},
                          {rat(1, 10), rat(1, 5), rat(2, 5), rat(1, 2)},
                          {rat(1, 10), rat(2, 5), rat(7, 10), Rational(1)},
                          {rat(1, 5), rat(1, 2), Rational(1), rat(9, 10)}});
  auto norm = normalize_input(wf, rat(1, 5));
  auto reordered = monotone_reorder(norm.wf, 16);
  auto table = build_part_table(norm.r, reordered.q_measures);
  UniversalGraphon u = build_w0(reordered, table, mock_ckm(reordered.wf));

  RunConfig cfg;
  int res = 512;
  std::string img = render_pgm(*u.pg.kernel, res, cfg);
  std::string px = img.substr(img.size() - size_t(res) * res);
  const auto& g2 = u.table().part(u.g2_id);
  double center = (g2.lo.to_double() + g2.hi.to_double()) / 2.0;
  int row = int(center * res);
  int col = int(center * res);
  double value = u.g2_column_value(u.g2_id).to_double();
  int expect = int(std::lround(255.0 * (1.0 - value)));
  CHECK(int((unsigned char)px[size_t(row) * res + col]) == expect);

  // two renders of the same build are byte-identical
  CHECK(render_pgm(*u.pg.kernel, res, cfg) == img);
}
