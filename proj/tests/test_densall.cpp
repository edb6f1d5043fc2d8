#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/densall.hpp"
#include "graphonlab/density.hpp"
#include "helpers.hpp"

using namespace graphonlab;
using testutil::random_step;

namespace {

Rational eval_exact(const DensityPolynomial& p, const StepGraphon& w) {
  return p.evaluate<Rational>(
      [&](const SmallGraph& g) { return induced_density_rational(g, w); });
}

}  // namespace

TEST_CASE("connected graphs decompose to the identity polynomial") {
  for (const auto& h : {complete_graph(3), cycle_graph(4), path_graph(5)}) {
    auto p = densall_decompose(h);
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms()[0].coeff == Rational(1));
    REQUIRE(p.terms()[0].graphs.size() == 1);
    CHECK(p.terms()[0].graphs[0] == canonical_form(h));
  }
}

TEST_CASE("two disjoint edges") {
  SmallGraph two_k2 = SmallGraph::parse("4:0-1,2-3");
  auto p = densall_decompose(two_k2);
  for (const auto& t : p.terms())
    for (const auto& g : t.graphs) CHECK(g.connected());
  for (uint64_t seed : {11u, 12u, 13u}) {
    auto w = random_step(3, seed);
    CHECK(eval_exact(p, *w) == induced_density_rational(two_k2, *w));
  }
}

TEST_CASE("edge plus isolated vertex on five random graphons") {
  SmallGraph h = SmallGraph::parse("3:0-1");
  auto p = densall_decompose(h);
  for (uint64_t seed = 21; seed <= 25; ++seed) {
    auto w = random_step(3, seed);
    CHECK(eval_exact(p, *w) == induced_density_rational(h, *w));
  }
}

TEST_CASE("decomposition matches the exact oracle for every graph up to order 5") {
  std::vector<StepPtr> graphons;
  for (uint64_t seed = 31; seed <= 35; ++seed) graphons.push_back(random_step(3, seed));
  for (int n = 1; n <= 5; ++n) {
    for (const auto& h : enumerate_all(n)) {
      auto p = densall_decompose(h);
      for (const auto& t : p.terms())
        for (const auto& g : t.graphs) {
          CHECK(g.connected());
          CHECK(g.order() <= n);
        }
      for (const auto& w : graphons) {
        Rational expect = induced_density_rational(h, *w);
        Rational got = eval_exact(p, *w);
        CHECK(got == expect);
        // the acceptance tolerance, exercised through the double evaluator
        double got_d = p.evaluate<double>([&](const SmallGraph& g) {
          return induced_density_rational(g, *w).to_double();
        });
        CHECK(std::abs(got_d - expect.to_double()) < 1e-9);
      }
    }
  }
}

TEST_CASE("polynomial evaluation supports products") {
  auto a = DensityPolynomial::monomial(complete_graph(2));
  auto prod = a * a;
  REQUIRE(prod.terms().size() == 1);
  CHECK(prod.terms()[0].graphs.size() == 2);
  double val = prod.evaluate<double>([](const SmallGraph&) { return 0.5; });
  CHECK(val == Catch::Approx(0.25));
}
