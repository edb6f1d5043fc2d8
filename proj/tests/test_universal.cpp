#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/suites.hpp"
#include "graphonlab/universal.hpp"
#include "graphonlab/verify.hpp"
#include "helpers.hpp"

using namespace graphonlab;

namespace {

// four parts with degrees 0.1, 0.3, 0.55, 0.65 (buckets 2, 5, 9, 11 of 16)
StepPtr wf4() {
  return step_graphon({rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)},
                      {{Rational(0), rat(1, 10), rat(1, 10), rat(1, 5)},
                       {rat(1, 10), rat(1, 5), rat(2, 5), rat(1, 2)},
                       {rat(1, 10), rat(2, 5), rat(7, 10), Rational(1)},
                       {rat(1, 5), rat(1, 2), Rational(1), rat(9, 10)}});
}

UniversalGraphon build_fixture() {
  auto norm = normalize_input(wf4(), rat(1, 5));
  auto reordered = monotone_reorder(norm.wf, 4 * (1 << norm.r));
  auto table = build_part_table(norm.r, reordered.q_measures);
  return build_w0(reordered, table, mock_ckm(reordered.wf));
}

}  // namespace

TEST_CASE("normalize_input") {
  SECTION("admissible request is unchanged") {
    auto n = normalize_input(wf4(), rat(1, 5));
    CHECK(n.r == 2);
    CHECK(n.epsilon == rat(1, 5));
    CHECK(n.wf->parts() == 4);
  }
  SECTION("non-admissible request rescales into the top-left box") {
    auto n = normalize_input(wf4(), rat(3, 10));
    CHECK(n.r == 2);
    CHECK(n.epsilon == rat(1, 5));
    REQUIRE(n.wf->parts() == 5);
    // scale factor (1 - 3/10) / (1 - 1/5) = 7/8
    CHECK(n.wf->measure(0) == rat(1, 4) * rat(7, 8));
    CHECK(n.wf->measure(4) == Rational(1) - rat(7, 8));
    CHECK(n.wf->block(4, 0) == Rational(0));
    // degrees scale by 7/8
    CHECK(n.wf->part_degree(0) == wf4()->part_degree(0) * rat(7, 8));
  }
  SECTION("M and m are integers for every admissible epsilon") {
    for (int r = 1; r <= 8; ++r) {
      Rational eps = admissible_epsilon(r);
      Rational big_m = (Rational(1) / eps - Rational(1)) * Rational(4);
      CHECK(big_m == Rational(4 * (1 << r)));
    }
  }
}

TEST_CASE("monotone_reorder") {
  SECTION("already sorted input is unchanged") {
    auto rin = monotone_reorder(wf4(), 16);
    CHECK(rin.wf->block(0, 1) == wf4()->block(0, 1));
    CHECK(rin.wf->part_degree(0) == rat(1, 10));
  }
  SECTION("bucket membership: degree 0.30 lands in Q5 of 16") {
    auto rin = monotone_reorder(wf4(), 16);
    CHECK(rin.q_measures[1] == rat(1, 4));   // bucket 2: degree 0.1
    CHECK(rin.q_measures[4] == rat(1, 4));   // bucket 5: degree 0.3
    CHECK(rin.q_measures[8] == rat(1, 4));   // bucket 9: degree 0.55
    CHECK(rin.q_measures[10] == rat(1, 4));  // bucket 11: degree 0.65
    Rational total(0);
    for (const auto& q : rin.q_measures) total += q;
    CHECK(total == Rational(1));
  }
  SECTION("swapped parts are sorted and all densities up to order 4 survive") {
    auto swapped = step_graphon({rat(1, 2), rat(1, 2)},
                                {{rat(3, 4), rat(1, 2)}, {rat(1, 2), Rational(0)}});
    // degrees 5/8 and 1/4: out of order
    auto rin = monotone_reorder(swapped, 16);
    CHECK(rin.wf->part_degree(0) == rat(1, 4));
    CHECK(rin.wf->part_degree(1) == rat(5, 8));
    for (int n = 2; n <= 4; ++n)
      for (const auto& h : enumerate_all(n))
        CHECK(induced_density_rational(h, *swapped) == induced_density_rational(h, *rin.wf));
  }
  SECTION("degree-one rows are rejected") {
    auto ones = step_graphon({Rational(1)}, {{Rational(1)}});
    CHECK_THROWS_AS(monotone_reorder(ones, 16), DegreeOneError);
  }
}

TEST_CASE("part table") {
  auto rin = monotone_reorder(wf4(), 16);

  SECTION("r=2 layout") {
    auto t = build_part_table(2, rin.q_measures);
    CHECK(t.size() == 73);  // 3M + 3m + 13 with M = 16, m = 4
    Rational eps = rat(1, 5);
    CHECK(t.part(t.index_of("G1")).measure() == rat(1, 10));
    for (int k = 1; k <= 4; ++k)
      CHECK(t.part(t.index_of("C" + std::to_string(k))).measure() ==
            eps / Rational(20) * pow2(-k));
    CHECK(t.part(t.index_of("A2")).measure() == (Rational(1) - eps) * rat(1, 4));
    CHECK(t.part(t.index_of("A1")).measure() == Rational(0));
    CHECK(t.part(t.index_of("A2")).pre_degree == eps * Rational(3) / Rational(4));
    CHECK(t.part(t.index_of("BQ")).measure() == eps / Rational(20) * rat(5, 14));
    // deltas in (eps/8, eps/4), all distinct
    for (size_t i = 0; i < t.size(); ++i) {
      CHECK(t.part(int(i)).delta > eps.to_double() / 8.0);
      CHECK(t.part(int(i)).delta < eps.to_double() / 4.0);
    }
  }

  SECTION("measures telescope to 1 exactly for r = 1..6") {
    for (int r = 1; r <= 6; ++r) {
      int big_m = 4 * (1 << r);
      auto rr = monotone_reorder(wf4(), big_m);
      auto t = build_part_table(r, rr.q_measures);
      CHECK(int(t.size()) == 3 * big_m + 3 * (r + 2) + 13);
      CHECK(t.total_measure() == Rational(1));
    }
  }
}

TEST_CASE("mock embedded kernel") {
  auto rin = monotone_reorder(wf4(), 16);
  auto ckm = mock_ckm(rin.wf);
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    double x = rng.uniform();
    double y = rng.uniform();
    // the input sits on the 7th of the 14 columns
    CHECK(ckm->value((6.0 + x) / 14.0, (6.0 + y) / 14.0) == rin.wf->value(x, y));
    // the half kernel sits between the 7th and 8th
    CHECK(ckm->value((6.0 + x) / 14.0, (7.0 + y) / 14.0) == (x + y >= 1.0 ? 1.0 : 0.0));
    // everything else is zero
    double q = 8.0 / 14.0 + rng.uniform() * 5.0 / 14.0;
    CHECK(ckm->value(q, y) == 0.0);
  }
}

TEST_CASE("the assembled construction") {
  UniversalGraphon u = build_fixture();
  const PartTable& t = u.table();
  const Kernel& w = *u.pg.kernel;

  SECTION("basic shape") {
    CHECK(u.big_m == 16);
    CHECK(u.small_m == 4);
    CHECK(t.size() == 73);
    CHECK(u.epsilon == rat(1, 5));
  }

  SECTION("pointwise probes") {
    // E x E with both coordinates mapped into the second checker block is 1
    const auto& e1 = t.part(t.index_of("E1"));
    double e_lo = e1.lo.to_double();
    double e_len = (t.part(t.index_of("Einf")).hi - e1.lo).to_double();
    double xa = e_lo + 0.55 * e_len;
    double xb = e_lo + 0.70 * e_len;
    CHECK(w.value(xa, xb) == 1.0);
    double xc = e_lo + 0.3 * e_len;  // different block
    CHECK(w.value(xa, xc) == 0.0);

    // BA x F is zero
    const auto& ba = t.part(t.index_of("BA"));
    const auto& f3 = t.part(t.index_of("F3"));
    CHECK(w.value(ba.lo.to_double() + 1e-4, f3.lo.to_double() + 1e-4) == 0.0);

    // every X x G2 tile is the constant 4 delta_X / eps
    const auto& g2 = t.part(t.index_of("G2"));
    Rng rng(3);
    for (const char* name : {"A2", "BG5", "C1", "E2", "F7", "G1"}) {
      int id = t.index_of(name);
      const auto& p = t.part(id);
      if (p.measure().is_zero()) continue;
      double expect = u.g2_column_value(id).to_double();
      for (int s = 0; s < 10; ++s) {
        double x = p.lo.to_double() + p.measure().to_double() * rng.uniform();
        double y = g2.lo.to_double() + g2.measure().to_double() * rng.uniform();
        CHECK(w.value(x, y) == expect);
      }
    }

    // the A block carries the input kernel in relative coordinates
    double a_len = (Rational(1) - u.epsilon).to_double();
    for (int s = 0; s < 200; ++s) {
      double x = rng.uniform();
      double y = rng.uniform();
      CHECK(w.value(x * a_len, y * a_len) == u.wf->value(x, y));
    }
  }

  SECTION("kernel symmetry on random pairs") {
    Rng rng(5);
    for (int i = 0; i < 20000; ++i) {
      double x = rng.uniform();
      double y = rng.uniform();
      double v = w.value(x, y);
      CHECK(v == w.value(y, x));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  SECTION("degree profiles match the assembled kernel") {
    // h(x) is the exact row integral over everything left of G1
    double g1_lo = t.part(u.g1_id).lo.to_double();
    Rng rng(7);
    for (const char* name : {"A5", "BG9", "BP", "C2", "Cinf", "D3", "E1", "F11"}) {
      int id = t.index_of(name);
      const auto& p = t.part(id);
      if (p.measure().is_zero()) continue;
      for (int s = 0; s < 3; ++s) {
        double x = p.lo.to_double() + p.measure().to_double() * rng.uniform();
        Rational tcoord = (Rational::from_double_exact(x) - p.lo) / p.measure();
        double h_exact = u.h_profile[id].eval(tcoord).to_double();
        double est, se;
        Rng inner = Rng::stream(900 + id, s);
        detail::mc_row_integral(w, x, 0.0, g1_lo, 40000, inner, &est, &se);
        CHECK(std::abs(est - h_exact) <= 4.0 * se + 1e-3);
      }
    }
  }

  SECTION("realized degrees: pre-degree plus delta, all distinct") {
    std::vector<Rational> degs;
    for (size_t i = 0; i < t.size(); ++i) degs.push_back(u.part_degree_exact(int(i)));
    for (size_t i = 0; i < degs.size(); ++i)
      for (size_t j = i + 1; j < degs.size(); ++j)
        CHECK(rat_abs(degs[i] - degs[j]).to_double() > 1e-12);

    // spot check one measured degree by Monte Carlo
    int id = t.index_of("A9");
    const auto& p = t.part(id);
    double x = (p.lo + p.measure() / Rational(2)).to_double();
    double est, se;
    Rng rng(11);
    detail::mc_row_integral(w, x, 0.0, 1.0, 200000, rng, &est, &se);
    double expect = u.part_degree_exact(id).to_double();
    CHECK(std::abs(est - expect) <= 4.0 * se + 1e-3);
  }
}

TEST_CASE("suite construction counts") {
  UniversalGraphon u = build_fixture();

  SECTION("coordinate suite: the zero/one tile family matches the index ranges") {
    auto cs = build_suite("coordinate", u);
    int fig5 = 0;
    for (const auto& c : cs)
      if (c.name.rfind("coordinate/f5", 0) == 0) ++fig5;
    // 2 * #{i+j <= 16} + #{i+j >= 18} + 9 = 2*120 + 120 + 9
    CHECK(fig5 == 369);
  }

  SECTION("checker suite contains the block-measure sum constraint") {
    auto cs = build_suite("checker", u);
    bool found = false;
    for (const auto& c : cs)
      if (c.name == "checker/blocksum") {
        found = true;
        CHECK(c.right.terms().size() == 1);
        CHECK(c.right.terms()[0].coeff == rat(1, 3));
      }
    CHECK(found);
  }

  SECTION("distinguishing suite has exactly two constraints per part") {
    auto ds = build_suite("distinguishing", u);
    CHECK(ds.size() == 2 * u.table().size());
  }

  SECTION("unknown suite") { CHECK_THROWS_AS(build_suite("nope", u), UnknownSuite); }
}

TEST_CASE("suite smoke runs on the built kernel") {
  UniversalGraphon u = build_fixture();
  CheckConfig cfg;
  cfg.tuples = 8;
  cfg.samples = 4000;
  cfg.seed = 2024;

  SECTION("distinguishing passes and the zeroed column fails") {
    auto cs = build_suite("distinguishing", u);
    auto rep = run_suite("distinguishing", cs, u.pg, cfg);
    CHECK(rep.failed == 0);
    CHECK(rep.passed > 0);

    PartitionedGraphon mutated{mutate_zero_g2(u), u.table()};
    auto rep2 = run_suite("distinguishing", cs, mutated, cfg);
    CHECK(rep2.failed > 0);
  }

  SECTION("checker passes and the flattened E tile fails") {
    auto cs = build_suite("checker", u);
    auto rep = run_suite("checker", cs, u.pg, cfg);
    CHECK(rep.failed == 0);

    PartitionedGraphon mutated{mutate_e_tile(u, rat(1, 2)), u.table()};
    auto rep2 = run_suite("checker", cs, mutated, cfg);
    CHECK(rep2.failed > 0);
  }

  SECTION("exp_checker and balancing pass") {
    for (const char* name : {"exp_checker", "balancing"}) {
      auto cs = build_suite(name, u);
      auto rep = run_suite(name, cs, u.pg, cfg);
      INFO(name);
      CHECK(rep.failed == 0);
    }
  }
}

TEST_CASE("balance range error surfaces bad inputs") {
  // claim the low-degree mass sits in the top bucket: the balancing value
  // then falls outside [0,1] and the build must refuse
  auto rin = monotone_reorder(wf4(), 16);
  auto bad_q = rin.q_measures;
  std::swap(bad_q[1], bad_q[15]);
  auto table = build_part_table(2, bad_q);
  CHECK_THROWS_AS(build_w0(rin, table, mock_ckm(rin.wf)), BalanceRangeError);
}

TEST_CASE("grid-averaged half kernel fills every bucket at r=1") {
  auto wf = grid_graphon(*half_graphon(), 16);
  auto norm = normalize_input(wf, rat(1, 3));
  REQUIRE(norm.r == 1);
  auto reordered = monotone_reorder(norm.wf, 8);
  for (const auto& q : reordered.q_measures) CHECK(q == rat(1, 8));
  auto table = build_part_table(1, reordered.q_measures);
  UniversalGraphon u = build_w0(reordered, table, mock_ckm(reordered.wf));
  CHECK(u.table().size() == 3 * 8 + 3 * 3 + 13);

  CheckConfig cfg;
  cfg.tuples = 4;
  cfg.samples = 2000;
  cfg.seed = 77;
  for (const char* name : {"checker", "exp_checker", "distinguishing"}) {
    auto cs = build_suite(name, u);
    auto rep = run_suite(name, cs, u.pg, cfg);
    INFO(name);
    CHECK(rep.failed == 0);
    CHECK(rep.vacuous == 0);  // every part is live
  }
}
