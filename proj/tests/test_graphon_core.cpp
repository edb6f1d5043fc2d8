#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/kernel.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/step.hpp"
#include "graphonlab/tiled.hpp"

using namespace graphonlab;

namespace {

StepPtr bipartite_halves() {
  return step_graphon({rat(1, 2), rat(1, 2)},
                      {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
}

}  // namespace

TEST_CASE("step graphon evaluation and validation") {
  auto w = bipartite_halves();
  CHECK(w->value(0.25, 0.75) == 1.0);
  CHECK(w->value(0.25, 0.25) == 0.0);
  CHECK(w->value(0.75, 0.75) == 0.0);

  // boundary points belong to the right-closed side: 0.5 is in part 1
  CHECK(w->part_index(0.5) == 1);
  CHECK(w->part_index(Rational(rat(1, 2))) == 1);
  CHECK(w->part_index(0.0) == 0);

  CHECK_THROWS_AS(step_graphon({rat(1, 2), rat(1, 3)},
                               {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}),
                  MeasureSumError);
  CHECK_THROWS_AS(step_graphon({rat(1, 2), rat(1, 2)},
                               {{Rational(0), Rational(1)}, {Rational(0), Rational(0)}}),
                  AsymmetryError);
  CHECK_THROWS_AS(step_graphon({Rational(1)}, {{Rational(2)}}), RangeError);
}

TEST_CASE("half graphon") {
  auto w = half_graphon();
  CHECK(w->value(0.7, 0.4) == 1.0);
  CHECK(w->value(0.3, 0.3) == 0.0);
  CHECK(w->value(0.5, 0.5) == 1.0);  // boundary x+y = 1
}

TEST_CASE("checker graphon levels") {
  auto w1 = checker_graphon(1);
  CHECK(w1->value(0.1, 0.3) == 1.0);  // both in I_1 = [0, 1/2)
  CHECK(w1->value(0.1, 0.6) == 0.0);  // I_1 vs I_2
  CHECK(w1->value(0.5, 0.6) == 1.0);
  CHECK(w1->value(0.75, 0.8) == 1.0);

  // refined checker: same I_2 but different sub-blocks
  auto w2 = checker_graphon(2);
  CHECK(w2->value(0.55, 0.70) == 0.0);
  CHECK(w2->value(0.55, 0.60) == 1.0);
  CHECK(w2->value(0.1, 0.3) == 1.0);  // I_1 is not subdivided

  CHECK_THROWS(checker_graphon(0));
}

TEST_CASE("checker block lengths: sum of |I_k|^2 has tail 4^{-K}/3") {
  for (int K : {5, 20, 40}) {
    CheckerKernel c(1, K);
    auto blocks = c.blocks();
    REQUIRE(blocks.size() == size_t(K + 1));
    Rational sum(0);
    for (int k = 0; k < K; ++k) sum += blocks[k].length() * blocks[k].length();
    CHECK(sum == Rational(1) / Rational(3) - pow2(-2 * K) / Rational(3));
    // blocks abut with no gaps
    Rational cursor(0);
    for (const auto& b : blocks) {
      CHECK(b.lo == cursor);
      cursor = b.hi;
    }
    CHECK(cursor == Rational(1));
  }
}

TEST_CASE("kernel symmetry and range on random pairs") {
  auto w1 = bipartite_halves();
  auto w2 = checker_graphon(2);
  auto w3 = half_graphon();
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    double x = rng.uniform();
    double y = rng.uniform();
    for (const Kernel* w : {(const Kernel*)w1.get(), (const Kernel*)w2.get(),
                            (const Kernel*)w3.get()}) {
      double v = w->value(x, y);
      CHECK(v == w->value(y, x));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("evaluation is pure") {
  auto w = checker_graphon(3);
  for (int i = 0; i < 100; ++i) CHECK(w->value(0.81, 0.83) == w->value(0.81, 0.83));
}

TEST_CASE("tiled graphon dispatch") {
  std::vector<PartSpan> parts{{"X", Rational(0), rat(1, 4)},
                              {"Y", rat(1, 4), rat(3, 4)},
                              {"Z", rat(3, 4), Rational(1)}};

  SECTION("empty tile map is the zero graphon") {
    TiledGraphon w(parts);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(w.value(rng.uniform(), rng.uniform()) == 0.0);
  }

  SECTION("single diagonal tile of constant 1") {
    TiledGraphon w(parts);
    w.add_tile(0, 0, 0, 0, constant_graphon(Rational(1)));
    CHECK(w.value(0.1, 0.2) == 1.0);
    CHECK(w.value(0.1, 0.3) == 0.0);
    // row integral = measure of X for x in X
    double out = 0.0;
    REQUIRE(w.row_integral(0.1, 0.0, 1.0, &out));
    CHECK(out == Catch::Approx(0.25));
  }

  SECTION("off-diagonal tile dispatches symmetrically") {
    TiledGraphon w(parts);
    w.add_tile(0, 0, 1, 1, half_graphon());
    Rng rng(11);
    for (int i = 0; i < 20000; ++i) {
      double x = rng.uniform();
      double y = rng.uniform();
      CHECK(w.value(x, y) == w.value(y, x));
    }
    // half kernel in tile-relative coordinates
    CHECK(w.value(0.20, 0.70) == 1.0);   // rel (0.8, 0.9)
    CHECK(w.value(0.01, 0.26) == 0.0);   // rel (0.04, 0.02)
    CHECK(w.value(0.70, 0.20) == 1.0);   // mirrored
  }

  SECTION("overlapping tiles are rejected") {
    TiledGraphon w(parts);
    w.add_tile(0, 1, 0, 1, constant_graphon(rat(1, 2)));
    CHECK_THROWS_AS(w.add_tile(0, 0, 1, 1, half_graphon()), OverlapError);
  }

  SECTION("partition must cover [0,1) exactly") {
    CHECK_THROWS_AS(TiledGraphon({{"X", Rational(0), rat(1, 2)}}), CoverageError);
    CHECK_THROWS_AS(TiledGraphon({{"X", Rational(0), rat(1, 2)},
                                  {"Y", rat(2, 3), Rational(1)}}),
                    CoverageError);
  }
}

TEST_CASE("tile replacement produces an independent kernel") {
  std::vector<PartSpan> parts{{"X", Rational(0), rat(1, 2)}, {"Y", rat(1, 2), Rational(1)}};
  TiledGraphon w(parts);
  w.add_tile(0, 0, 0, 0, constant_graphon(Rational(1)));
  w.add_tile(0, 0, 1, 1, constant_graphon(rat(1, 4)));
  TiledGraphon mutated = w.with_tile(0, 0, constant_graphon(Rational(0)));
  CHECK(w.value(0.1, 0.1) == 1.0);
  CHECK(mutated.value(0.1, 0.1) == 0.0);
  CHECK(mutated.value(0.1, 0.9) == 0.25);
}
