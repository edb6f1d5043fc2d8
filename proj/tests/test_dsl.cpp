#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/dsl_parser.hpp"
#include "graphonlab/evaluate.hpp"
#include "helpers.hpp"

using namespace graphonlab;
using testutil::random_step;

namespace {

// Exact evaluation of a decorated-graph probability at fixed roots for a step
// kernel: enumerate non-root part assignments within decorations.
Rational exact_factor(const StepGraphon& w, const PartTable& table, const DecoratedGraph& g,
                      const std::vector<double>& rootx) {
  int n = g.order();
  int m = g.roots;
  std::vector<int> part_of(n, -1);
  for (int i = 0; i < m; ++i) part_of[i] = int(w.part_index(rootx[i]));
  Rational total(0);
  auto rec = [&](auto&& self, int v, Rational weight) -> void {
    if (v == n) {
      total += weight;
      return;
    }
    Rational dec_total(0);
    for (int id : g.decorations[v]) dec_total += table.part(id).measure();
    for (int id : g.decorations[v]) {
      Rational wgt = table.part(id).measure() / dec_total;
      if (wgt.is_zero()) continue;
      part_of[v] = id;
      Rational next = weight * wgt;
      for (int u = 0; u < v; ++u) {
        if (u < m && v < m) continue;
        Rational val = w.block(part_of[u], part_of[v]);
        next *= g.graph.has_edge(u, v) ? val : Rational(1) - val;
      }
      self(self, v + 1, next);
    }
    part_of[v] = -1;
  };
  rec(rec, m, Rational(1));
  return total;
}

DecoratedGraph make_graph(const PartTable& table, const std::string& text) {
  // wraps the parser for a single decorated graph
  Constraint c = parse_constraint("graph" + text + " = 0", table);
  return c.left.terms().at(0).factors.at(0);
}

}  // namespace

TEST_CASE("evaluation: isolated non-root lands in its decoration with probability 1") {
  auto w = partitioned_step(step_graphon({Rational(1)}, {{rat(1, 2)}}));
  DecoratedGraph g = make_graph(w.table, "{1; ; roots=0; dec=[{P1}]}");
  auto result = evaluate_at_roots(DensityExpression::graph(g), w, {}, 2000, 3);
  CHECK(result.value == 1.0);
  CHECK(result.std_error == 0.0);
}

TEST_CASE("evaluation on the two-part alternating kernel") {
  auto w = partitioned_step(step_graphon(
      {rat(1, 2), rat(1, 2)}, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}));

  SECTION("adjacent non-root in the opposite part is certain") {
    DecoratedGraph g = make_graph(w.table, "{2; 0-1; roots=1; dec=[{P1},{P2}]}");
    auto r = evaluate_at_roots(DensityExpression::graph(g), w, {0.2}, 2000, 5);
    CHECK(r.value == 1.0);
  }
  SECTION("adjacent non-root in the same part is impossible") {
    DecoratedGraph g = make_graph(w.table, "{2; 0-1; roots=1; dec=[{P1},{P1}]}");
    auto r = evaluate_at_roots(DensityExpression::graph(g), w, {0.2}, 2000, 5);
    CHECK(r.value == 0.0);
  }
  SECTION("infeasible root tuples are rejected") {
    DecoratedGraph g = make_graph(w.table, "{2; 0-1; roots=2; dec=[{P1},{P1}]}");
    CHECK_THROWS_AS(evaluate_at_roots(DensityExpression::graph(g), w, {0.2, 0.3}, 100, 5),
                    InfeasibleRoots);
    DecoratedGraph g2 = make_graph(w.table, "{2; 0-1; roots=2; dec=[{P1},{P2}]}");
    CHECK_NOTHROW(evaluate_at_roots(DensityExpression::graph(g2), w, {0.2, 0.7}, 100, 5));
  }
}

TEST_CASE("evaluation matches the exact oracle on random step graphons") {
  for (uint64_t seed : {3u, 4u}) {
    auto step = random_step(3, seed);
    auto w = partitioned_step(step);
    std::vector<std::string> specs{
        "{3; 0-1,1-2; roots=1; dec=[{P1},{P2,P3},{P1,P2}]}",
        "{3; 0-1,0-2; roots=1; dec=[{P2},{P1,P2,P3},{P3}]}",
        "{2; 0-1; roots=0; dec=[{P1,P2},{P2,P3}]}",
    };
    for (const auto& spec : specs) {
      DecoratedGraph g = make_graph(w.table, spec);
      std::vector<double> roots;
      if (g.roots == 1) roots.push_back(g.decorations[0][0] == 0 ? 0.05
                                        : w.table.part(g.decorations[0][0]).lo.to_double() + 1e-4);
      auto mc = evaluate_at_roots(DensityExpression::graph(g), w, roots, 60000, seed * 17);
      Rational exact = exact_factor(*step, w.table, g, roots);
      CHECK(std::abs(mc.value - exact.to_double()) <= 4.0 * mc.std_error + 1e-3);
    }
  }
}

TEST_CASE("evaluation with zero non-roots has no sampling noise") {
  auto w = partitioned_step(random_step(2, 9));
  DecoratedGraph g = make_graph(w.table, "{2; 0-1; roots=2; dec=[{P1},{P2}]}");
  DensityExpression e;
  e.add_term(DecoratedTerm{rat(2, 3), {g}});
  e += DensityExpression::scalar(rat(-1, 4));
  auto r = evaluate_at_roots(e, w, {0.05, 0.95}, 10, 3);
  CHECK(r.value == Catch::Approx(2.0 / 3.0 - 0.25).margin(1e-15));
  CHECK(r.std_error == 0.0);
}

TEST_CASE("evaluation is invariant under non-root relabeling") {
  auto w = partitioned_step(random_step(3, 21));
  // same decorated graph with the two non-roots spelled in both orders
  DecoratedGraph a = make_graph(w.table, "{3; 0-1,1-2; roots=1; dec=[{P1},{P2},{P3}]}");
  DecoratedGraph b = make_graph(w.table, "{3; 0-2,2-1; roots=1; dec=[{P1},{P3},{P2}]}");
  CHECK(a.canonical() == b.canonical());
  auto ra = evaluate_at_roots(DensityExpression::graph(a), w, {0.05}, 20000, 7);
  auto rb = evaluate_at_roots(DensityExpression::graph(b), w, {0.05}, 20000, 7);
  CHECK(ra.value == rb.value);  // canonicalization makes the streams identical
}

TEST_CASE("check_constraint") {
  Rational c = rat(5, 8);
  auto w = partitioned_step(step_graphon({Rational(1)}, {{c}}));

  SECTION("edge density of a constant graphon") {
    Constraint ok = parse_constraint("graph{2; 0-1; roots=0; dec=[{P1},{P1}]} = 5/8", w.table);
    CheckConfig cfg;
    cfg.tuples = 10;
    cfg.samples = 20000;
    cfg.seed = 11;
    auto rep = check_constraint(ok, w, cfg);
    CHECK(rep.passed);

    Constraint bad = parse_constraint("graph{2; 0-1; roots=0; dec=[{P1},{P1}]} = 1/2", w.table);
    auto rep2 = check_constraint(bad, w, cfg);
    CHECK_FALSE(rep2.passed);
    CHECK(rep2.max_abs_deviation > 0.1);
  }

  SECTION("syntactically identical sides cancel exactly") {
    Constraint c2 = parse_constraint(
        "graph{3; 0-1,1-2; roots=1; dec=[{P1},{P1},{P1}]} = "
        "graph{3; 0-2,2-1; roots=1; dec=[{P1},{P1},{P1}]}",
        w.table);
    CheckConfig cfg;
    cfg.tuples = 5;
    cfg.samples = 10;
    auto rep = check_constraint(c2, w, cfg);
    CHECK(rep.passed);
    CHECK(rep.max_abs_deviation == 0.0);
    CHECK(rep.note == "no decorated terms; exact evaluation");
  }

  SECTION("feasibility sampling error on a measure-zero feasible set") {
    auto wz = partitioned_step(step_graphon({Rational(1)}, {{Rational(0)}}));
    Constraint c3 = parse_constraint("graph{2; 0-1; roots=2; dec=[{P1},{P1}]} = 0", wz.table);
    CheckConfig cfg;
    cfg.tuples = 1;
    cfg.feasibility_budget = 20000;
    CHECK_THROWS_AS(check_constraint(c3, wz, cfg), FeasibilitySamplingError);
  }
}

TEST_CASE("expand_to_simple") {
  auto step = step_graphon({rat(1, 3), rat(1, 3), rat(1, 3)},
                           {{Rational(0), Rational(1), rat(1, 2)},
                            {Rational(1), rat(1, 4), rat(3, 4)},
                            {rat(1, 2), rat(3, 4), Rational(1)}});
  auto w = partitioned_step(step);

  SECTION("already simple constraints pass through") {
    Constraint c = parse_constraint("graph{2; 0-1; roots=1; dec=[{P1},{P2}]} = 1", w.table);
    auto out = expand_to_simple(c, w.table);
    REQUIRE(out.size() == 1);
    CHECK(dsl::print_constraint(out[0], w.table) == dsl::print_constraint(c, w.table));
  }

  SECTION("non-root set decorations become measure-weighted combinations") {
    Constraint c = parse_constraint("graph{2; 0-1; roots=1; dec=[{P1},{P2,P3}]} = 7/8", w.table);
    auto out = expand_to_simple(c, w.table);
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].left.terms().size() == 2);
    for (const auto& t : out[0].left.terms()) CHECK(t.coeff == rat(1, 2));
  }

  SECTION("root set decorations case split") {
    Constraint c =
        parse_constraint("graph{2; 0-1; roots=1; dec=[{P1,P2,P3},{P1}]} = 1/2", w.table);
    auto out = expand_to_simple(c, w.table);
    CHECK(out.size() == 3);
  }

  SECTION("expansion soundness: original passes iff all expanded members pass") {
    Rng rng(2027);
    int checked = 0;
    for (uint64_t seed = 1; checked < 10 && seed < 60; ++seed) {
      auto step_r = random_step(3, seed * 7 + 1, 4);
      auto wr = partitioned_step(step_r);
      // random 2-3 vertex decorated graph with one root and set decorations
      int n = 2 + int(rng.below(2));
      SmallGraph g(n);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (rng.uniform() < 0.7) g.add_edge(u, v);
      DecoratedGraph dg;
      dg.graph = g;
      dg.roots = 1;
      dg.decorations.assign(n, {});
      dg.decorations[0] = {int(rng.below(3))};
      for (int v = 1; v < n; ++v)
        dg.decorations[v] = rng.uniform() < 0.5 ? std::vector<int>{0, 1, 2}
                                                : std::vector<int>{int(rng.below(3)), 2};
      for (auto& d : dg.decorations) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
      }
      std::vector<double> roots{wr.table.part(dg.decorations[0][0]).lo.to_double() + 1e-4};
      Rational exact = exact_factor(*step_r, wr.table, dg, roots);
      bool should_pass = (checked % 2 == 0);
      Rational target = should_pass ? exact : exact + rat(1, 5);
      Constraint c;
      c.name = "rand" + std::to_string(checked);
      c.left = DensityExpression::graph(dg);
      c.right = DensityExpression::scalar(target);

      CheckConfig cfg;
      cfg.tuples = 20;
      cfg.samples = 20000;
      cfg.seed = seed;
      bool orig;
      try {
        orig = check_constraint(c, wr, cfg).passed;
      } catch (const FeasibilitySamplingError&) {
        continue;  // degenerate random instance
      }
      bool all_expanded = true;
      for (const auto& simple : expand_to_simple(c, wr.table)) {
        try {
          if (!check_constraint(simple, wr, cfg).passed) all_expanded = false;
        } catch (const FeasibilitySamplingError&) {
          all_expanded = false;
        }
      }
      CHECK(orig == all_expanded);
      CHECK(orig == should_pass);
      ++checked;
    }
    CHECK(checked == 10);
  }
}

TEST_CASE("parser round-trip and errors") {
  auto w = partitioned_step(random_step(3, 50));
  std::vector<std::string> texts{
      "graph{2; 0-1; roots=1; dec=[{P1},{P2}]} = 1/2",
      "3/4*graph{3; 0-1,1-2; roots=2; free=0-1; dec=[{P1},{P2},{P1,P3}]} - "
      "graph{3; 0-1,1-2; roots=2; free=0-1; dec=[{P1},{P2},{P2}]} = 0",
      "graph{2; 0-1; roots=0; dec=[{P1},{P1}]}*graph{2; ; roots=0; dec=[{P2},{P3}]} = 1/4",
  };
  for (const auto& text : texts) {
    Constraint c = parse_constraint(text, w.table);
    std::string printed = dsl::print_constraint(c, w.table);
    Constraint c2 = parse_constraint(printed, w.table);
    CHECK(dsl::print_constraint(c2, w.table) == printed);
  }

  CHECK_THROWS_AS(parse_constraint("graph{2; 0-1; roots=1; dec=[{P1}]} = 0", w.table),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_constraint("graph{2; 0-1; roots=1; dec=[{P9},{P1}]} = 0", w.table),
                  ConstraintParseError);
  CHECK_THROWS_AS(parse_constraint("junk", w.table), ConstraintParseError);
  // incompatible root decorations across sides
  CHECK_THROWS_AS(parse_constraint("graph{2; 0-1; roots=1; dec=[{P1},{P2}]} = "
                                   "graph{2; 0-1; roots=1; dec=[{P2},{P2}]}",
                                   w.table),
                  CompatibilityError);
}

TEST_CASE("group prefix decorations") {
  PartTable t;
  t.add({"A1", 'A', Rational(0), rat(1, 4), Rational(0), false, 0.0});
  t.add({"A2", 'A', rat(1, 4), rat(1, 2), Rational(0), false, 0.0});
  t.add({"B1", 'B', rat(1, 2), Rational(1), Rational(0), false, 0.0});
  t.finalize();
  Constraint c = parse_constraint("graph{1; ; roots=0; dec=[{A*}]} = 1", t);
  CHECK(c.left.terms()[0].factors[0].decorations[0] == std::vector<int>{0, 1});
  Constraint c2 = parse_constraint("graph{1; ; roots=0; dec=[{*}]} = 1", t);
  CHECK(c2.left.terms()[0].factors[0].decorations[0] == std::vector<int>{0, 1, 2});
}
