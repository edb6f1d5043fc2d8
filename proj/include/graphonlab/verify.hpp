#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "graphonlab/evaluate.hpp"
#include "graphonlab/suites.hpp"
#include "graphonlab/universal.hpp"

namespace graphonlab {

struct VerifyItem {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::vector<ConstraintReport> constraints;
  int passed = 0, failed = 0, vacuous = 0;

  bool all_passed() const { return failed == 0; }
};

struct W0Report {
  std::vector<VerifyItem> items;
  std::vector<SuiteReport> suites;

  bool all_passed() const {
    for (const auto& i : items)
      if (!i.passed) return false;
    for (const auto& s : suites)
      if (!s.all_passed()) return false;
    return true;
  }
};

struct VerifyConfig {
  uint64_t seed = 1;
  int transfer_depth = 3;
  int xs_per_part = 50;
  long long degree_samples = 20000;
  long long square_samples = 4000;
  long long tc4_samples = 200000;
  std::vector<std::string> suites{"checker",          "exp_checker", "dyadic_ref",
                                  "density_transfer", "balancing",   "distinguishing"};
  CheckConfig suite_cfg{/*tuples=*/24, /*samples=*/10'000, /*tol_base=*/1e-3,
                        /*seed=*/1,    /*workers=*/0,      /*feasibility_budget=*/1'000'000};
  int workers = 0;
};

// Throws nothing; a constraint whose roots or extensions live on zero-measure
// parts is reported as vacuous (its feasible set is null).
inline SuiteReport run_suite(const std::string& name, const std::vector<Constraint>& constraints,
                             const PartitionedGraphon& pg, CheckConfig cfg) {
  SuiteReport rep;
  rep.suite = name;
  uint64_t base_seed = cfg.seed;
  for (size_t i = 0; i < constraints.size(); ++i) {
    cfg.seed = base_seed ^ (uint64_t(i + 1) * 0x9e3779b97f4a7c15ULL);
    ConstraintReport r;
    try {
      // reject constraints whose extension decorations are null upfront
      bool empty_extension = false;
      DensityExpression diff = constraints[i].difference();
      for (const auto& t : diff.terms())
        for (const auto& f : t.factors)
          for (int v = f.roots; v < f.order() && !empty_extension; ++v) {
            Rational total(0);
            for (int id : f.decorations[v]) total += pg.table.part(id).measure();
            if (total.is_zero()) empty_extension = true;
          }
      if (empty_extension) {
        r.name = constraints[i].name;
        r.vacuous = true;
        r.passed = true;
        r.note = "extension decoration has measure 0";
      } else {
        r = check_constraint(constraints[i], pg, cfg);
      }
    } catch (const FeasibilitySamplingError&) {
      r.name = constraints[i].name;
      r.vacuous = true;
      r.passed = true;
      r.note = "no feasible root tuple (null feasible set)";
    }
    if (r.vacuous)
      ++rep.vacuous;
    else if (r.passed)
      ++rep.passed;
    else
      ++rep.failed;
    rep.constraints.push_back(std::move(r));
  }
  return rep;
}

namespace detail {

// Monte-Carlo mean of W over [x fixed] x [lo,hi), scaled to the integral.
inline void mc_row_integral(const Kernel& w, double x, double lo, double hi, long long samples,
                            Rng& rng, double* value, double* se) {
  KahanSum sum, sumsq;
  for (long long i = 0; i < samples; ++i) {
    double z = lo + (hi - lo) * rng.uniform();
    double v = w.value(x, z);
    sum.add(v);
    sumsq.add(v * v);
  }
  double mean = sum.value() / double(samples);
  double var = std::max(0.0, sumsq.value() / double(samples) - mean * mean);
  *value = mean * (hi - lo);
  *se = std::sqrt(var / double(samples)) * (hi - lo);
}

// Normalized density of a rectangle under a kernel, by Monte Carlo.
inline void mc_rect_density(const Kernel& w, double xlo, double xhi, double ylo, double yhi,
                            long long samples, Rng& rng, double* value, double* se) {
  KahanSum sum, sumsq;
  for (long long i = 0; i < samples; ++i) {
    double x = xlo + (xhi - xlo) * rng.uniform();
    double y = ylo + (yhi - ylo) * rng.uniform();
    double v = w.value(x, y);
    sum.add(v);
    sumsq.add(v * v);
  }
  double mean = sum.value() / double(samples);
  double var = std::max(0.0, sumsq.value() / double(samples) - mean * mean);
  *value = mean;
  *se = std::sqrt(var / double(samples));
}

}  // namespace detail

// Mutations used by the sensitivity experiments.
inline std::shared_ptr<TiledGraphon> mutate_e_tile(const UniversalGraphon& u, Rational value) {
  size_t e_first = size_t(u.e_ids.front());
  return std::make_shared<TiledGraphon>(
      u.w0->transform_tiles([&](const TiledGraphon::TileInfo& info, KernelPtr k) -> KernelPtr {
        if (info.x_first == e_first && info.y_first == e_first)
          return constant_graphon(value);
        return k;
      }));
}

inline std::shared_ptr<TiledGraphon> mutate_zero_g2(const UniversalGraphon& u) {
  size_t g2 = size_t(u.g2_id);
  return std::make_shared<TiledGraphon>(
      u.w0->transform_tiles([&](const TiledGraphon::TileInfo& info, KernelPtr k) -> KernelPtr {
        if (info.y_first == g2 || info.x_first == g2) return constant_graphon(Rational(0));
        return k;
      }));
}

// Numerical verification of the construction: pre-degree integrals, degree
// distinctness, dyadic-square density transfer, the C4 moment transfer, the
// balancing range, the distinguishing column, and the constraint suites.
inline W0Report verify_w0(const UniversalGraphon& u, const VerifyConfig& cfg = {}) {
  W0Report report;
  const PartTable& table = u.table();
  const Kernel& w = *u.pg.kernel;
  double g2_lo = table.part(u.g2_id).lo.to_double();

  // (i) pre-degree equation on sampled vertices; the noise allowance uses a
  // familywise-corrected z so the false-failure rate stays near 0.2% in total
  {
    VerifyItem item;
    item.name = "pre-degree integrals";
    item.passed = true;
    int live_parts = 0;
    for (size_t i = 0; i < table.size(); ++i) {
      int id = int(i);
      if (id != u.g1_id && id != u.g2_id && !table.part(id).measure().is_zero()) ++live_parts;
    }
    double zq = two_sided_z(0.002 / double(std::max(1, live_parts * cfg.xs_per_part)));
    double worst = -1e300;
    Rng rng = Rng::stream(cfg.seed, 101);
    for (size_t i = 0; i < table.size(); ++i) {
      int id = int(i);
      const auto& p = table.part(id);
      if (id == u.g1_id || id == u.g2_id || p.measure().is_zero()) continue;
      double lo = p.lo.to_double(), hi = p.hi.to_double();
      double pd = p.pre_degree.to_double();
      for (int s = 0; s < cfg.xs_per_part; ++s) {
        double x = lo + (hi - lo) * rng.uniform();
        double est, se;
        detail::mc_row_integral(w, x, 0.0, g2_lo, cfg.degree_samples, rng, &est, &se);
        double excess = std::abs(est - pd) - zq * se;
        if (excess > worst) worst = excess;
        if (excess > 1e-3) {
          item.passed = false;
          item.note = "worst at part " + p.name;
        }
      }
    }
    item.observed = worst;
    item.tolerance = 1e-3;
    report.items.push_back(item);
  }

  // (ii) all part degrees pairwise distinct
  {
    VerifyItem item;
    item.name = "degree distinctness";
    std::vector<Rational> degs;
    for (size_t i = 0; i < table.size(); ++i) degs.push_back(u.part_degree_exact(int(i)));
    double min_gap = 1e300;
    bool distinct = true;
    for (size_t i = 0; i < degs.size(); ++i)
      for (size_t j = i + 1; j < degs.size(); ++j) {
        double gap = std::abs((degs[i] - degs[j]).to_double());
        min_gap = std::min(min_gap, gap);
        if (!(degs[i] != degs[j])) distinct = false;
      }
    item.passed = distinct && min_gap > 1e-12;
    item.observed = min_gap;
    item.tolerance = 1e-12;
    item.note = "minimum pairwise degree gap";
    report.items.push_back(item);
  }

  // (iii) dyadic-square density transfer between the input block and the
  // embedded copy, plus agreement with the exact input values
  {
    VerifyItem item;
    item.name = "dyadic-square transfer (depth " + std::to_string(cfg.transfer_depth) + ")";
    item.passed = true;
    long long live = 0;
    for (int i = 0; i < u.big_m; ++i)
      if (!u.q_measures[i].is_zero()) ++live;
    long long squares = 0;
    for (int s = 1; s <= cfg.transfer_depth; ++s) squares += (1LL << (s - 1)) * (1LL << (s - 1));
    double zq = two_sided_z(0.002 / double(std::max(1LL, 3 * live * live * squares)));
    double worst = -1e300;
    Rng rng = Rng::stream(cfg.seed, 202);
    std::vector<Rational> q_lo(u.big_m + 1, Rational(0));
    for (int k = 0; k < u.big_m; ++k) q_lo[k + 1] = q_lo[k] + u.q_measures[k];
    for (int i = 0; i < u.big_m; ++i) {
      if (u.q_measures[i].is_zero()) continue;
      for (int j = 0; j < u.big_m; ++j) {
        if (u.q_measures[j].is_zero()) continue;
        const auto& ai = table.part(u.a_ids[i]);
        const auto& aj = table.part(u.a_ids[j]);
        const auto& bi = table.part(u.bg_ids[i]);
        const auto& bj = table.part(u.bg_ids[j]);
        for (int s = 1; s <= cfg.transfer_depth; ++s) {
          long long cells = 1LL << (s - 1);
          for (long long t = 1; t <= cells; ++t)
            for (long long t2 = 1; t2 <= cells; ++t2) {
              Interval iu = dyadic_interval({s, t});
              Interval iv = dyadic_interval({s, t2});
              // exact value from the input kernel
              Interval wu(q_lo[i] + iu.lo * u.q_measures[i], q_lo[i] + iu.hi * u.q_measures[i]);
              Interval wv(q_lo[j] + iv.lo * u.q_measures[j], q_lo[j] + iv.hi * u.q_measures[j]);
              Rational exact =
                  u.wf->pair_density_exact({wu}, {wv}) / (wu.length() * wv.length());
              auto sub = [&](const PartTable::Part& p, const Interval& rel) {
                double lo = p.lo.to_double(), len = p.measure().to_double();
                return std::pair<double, double>{lo + rel.lo.to_double() * len,
                                                 lo + rel.hi.to_double() * len};
              };
              auto [ax0, ax1] = sub(ai, iu);
              auto [ay0, ay1] = sub(aj, iv);
              auto [bx0, bx1] = sub(bi, iu);
              auto [by0, by1] = sub(bj, iv);
              double da, sa, db, sb;
              detail::mc_rect_density(w, ax0, ax1, ay0, ay1, cfg.square_samples, rng, &da, &sa);
              detail::mc_rect_density(w, bx0, bx1, by0, by1, cfg.square_samples, rng, &db, &sb);
              double ex = exact.to_double();
              double excess = std::max({std::abs(da - ex) - zq * sa,
                                        std::abs(db - ex) - zq * sb,
                                        std::abs(da - db) - zq * (sa + sb)});
              if (excess > worst) worst = excess;
              if (excess > 1e-3) item.passed = false;
            }
        }
      }
    }
    item.observed = worst;
    item.tolerance = 1e-3;
    item.note = "max excess over squares";
    report.items.push_back(item);
  }

  // (iv) C4 moment of the input block equals the input's
  {
    VerifyItem item;
    item.name = "t(C4) transfer";
    SubgraphonView sub(u.pg.kernel, 0.0, (Rational(1) - u.epsilon).to_double());
    McConfig mc;
    mc.seed = cfg.seed ^ 0xc4c4c4c4ULL;
    mc.samples = cfg.tc4_samples;
    mc.workers = cfg.workers;
    auto rep = t_c4(sub, mc);
    double exact = t_c4_rational(*u.wf).to_double();
    item.observed = std::abs(rep.estimate - exact);
    item.tolerance = 3.0 * rep.std_error + 1e-3;
    item.passed = item.observed <= item.tolerance;
    item.note = "|t(C4, A block) - t(C4, input)|";
    report.items.push_back(item);
  }

  // (v) balancing values lie in [0,1] and G1 column integrates to pdeg - h
  {
    VerifyItem item;
    item.name = "balancing range";
    item.passed = true;
    Rational lo(1), hi(0);
    for (size_t i = 0; i < table.size(); ++i) {
      int id = int(i);
      if (id == u.g1_id || id == u.g2_id || table.part(id).measure().is_zero()) continue;
      const auto& prof = u.balance_profile[i];
      lo = rat_min(lo, prof.min_value());
      hi = rat_max(hi, prof.max_value());
    }
    if (lo < Rational(0) || hi > Rational(1)) item.passed = false;
    item.observed = hi.to_double();
    item.tolerance = 1.0;
    item.note = "balancing values within [" + lo.str() + ", " + hi.str() + "]";
    report.items.push_back(item);
  }

  // (vi) distinguishing column: constant per part with the prescribed value
  {
    VerifyItem item;
    item.name = "distinguishing column";
    item.passed = true;
    double worst = 0.0;
    Rng rng = Rng::stream(cfg.seed, 303);
    double g2_hi = table.part(u.g2_id).hi.to_double();
    for (size_t i = 0; i < table.size(); ++i) {
      int id = int(i);
      const auto& p = table.part(id);
      if (p.measure().is_zero()) continue;
      double expect = u.g2_column_value(id).to_double();
      for (int s = 0; s < 20; ++s) {
        double x = p.lo.to_double() + p.measure().to_double() * rng.uniform();
        double y = g2_lo + (g2_hi - g2_lo) * rng.uniform();
        worst = std::max(worst, std::abs(w.value(x, y) - expect));
      }
    }
    item.observed = worst;
    item.tolerance = 1e-12;
    item.passed = worst <= 1e-12;
    item.note = "max |column - 4 delta/eps| on samples";
    report.items.push_back(item);
  }

  // (vii) the constraint suites
  for (const auto& suite : cfg.suites) {
    auto constraints = build_suite(suite, u, default_ckm_params(*u.wf));
    CheckConfig sc = cfg.suite_cfg;
    sc.seed = cfg.seed ^ std::hash<std::string>{}(suite);
    sc.workers = cfg.workers > 0 ? cfg.workers : sc.workers;
    report.suites.push_back(run_suite(suite, constraints, u.pg, sc));
  }
  return report;
}

}  // namespace graphonlab
