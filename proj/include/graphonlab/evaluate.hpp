#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "graphonlab/decorated.hpp"
#include "graphonlab/parallel.hpp"
#include "graphonlab/parttable.hpp"
#include "graphonlab/rng.hpp"

namespace graphonlab {

struct InfeasibleRoots : std::invalid_argument {
  explicit InfeasibleRoots(const std::string& what) : std::invalid_argument(what) {}
};
struct EmptyDecoration : std::invalid_argument {
  explicit EmptyDecoration(const std::string& what) : std::invalid_argument(what) {}
};
struct FeasibilitySamplingError : std::runtime_error {
  explicit FeasibilitySamplingError(const std::string& what) : std::runtime_error(what) {}
};

struct CheckConfig {
  int tuples = 200;
  long long samples = 100'000;
  double tol_base = 1e-3;  // additive tolerance on top of the noise allowance
  uint64_t seed = 1;
  int workers = 0;
  long long feasibility_budget = 1'000'000;

  int effective_workers() const { return workers > 0 ? workers : default_workers(); }
};

// Normal tail quantile via bisection on erfc; z(p) with P(|N| > z) = p.
inline double two_sided_z(double p) {
  double lo = 0.0, hi = 12.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

struct DecorationSampler {
  std::vector<double> lows;
  std::vector<double> cums;  // cumulative lengths, last = total
  double total = 0.0;

  static DecorationSampler build(const PartTable& table, const std::vector<int>& parts) {
    DecorationSampler s;
    for (int id : parts) {
      const auto& p = table.part(id);
      double len = p.measure().to_double();
      if (len <= 0.0) continue;
      s.lows.push_back(p.lo.to_double());
      s.total += len;
      s.cums.push_back(s.total);
    }
    return s;
  }

  double sample(Rng& rng) const {
    double u = rng.uniform() * total;
    size_t i = size_t(std::lower_bound(cums.begin(), cums.end(), u) - cums.begin());
    if (i >= cums.size()) i = cums.size() - 1;
    double prev = i == 0 ? 0.0 : cums[i - 1];
    return lows[i] + (u - prev);
  }

  bool contains(const PartTable& table, const std::vector<int>& parts, double x) {
    for (int id : parts)
      if (table.part(id).lo.to_double() <= x && x < table.part(id).hi.to_double()) return true;
    return false;
  }
};

// Monte-Carlo estimate of one decorated-graph probability at fixed roots:
// non-roots are drawn uniformly from their decoration unions and every pair
// except root-root contributes W (edge) or 1-W (non-edge).
inline void factor_estimate(const Kernel& w, const DecoratedGraph& g, const PartTable& table,
                            const std::vector<double>& rootx, long long samples, Rng rng,
                            double* mean_out, double* se_out) {
  int n = g.order();
  int m = g.roots;
  int k = n - m;
  std::vector<DecorationSampler> samplers;
  for (int v = m; v < n; ++v) {
    auto s = DecorationSampler::build(table, g.decorations[v]);
    if (s.total <= 0.0)
      throw EmptyDecoration("decoration of vertex " + std::to_string(v) + " has measure 0");
    samplers.push_back(std::move(s));
  }
  struct Pair {
    int i, j;
    bool edge;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i + 1, m); j < n; ++j)
      pairs.push_back({i, j, g.graph.has_edge(i, j)});

  double x[SmallGraph::kMaxVertices];
  for (int i = 0; i < m; ++i) x[i] = rootx[i];
  KahanSum sum, sumsq;
  for (long long s = 0; s < samples; ++s) {
    for (int v = 0; v < k; ++v) x[m + v] = samplers[v].sample(rng);
    double prod = 1.0;
    for (const auto& p : pairs) {
      double val = w.value(x[p.i], x[p.j]);
      prod *= p.edge ? val : 1.0 - val;
      if (prod == 0.0) break;
    }
    sum.add(prod);
    sumsq.add(prod * prod);
  }
  double mean = sum.value() / double(samples);
  double var = std::max(0.0, sumsq.value() / double(samples) - mean * mean);
  *mean_out = mean;
  *se_out = std::sqrt(var / double(samples));
}

}  // namespace detail

struct EvalResult {
  double value = 0.0;
  double std_error = 0.0;
};

// Evaluates a decorated density expression at a feasible root tuple. Each
// factor is estimated on its own seeded stream; the product/sum error is
// propagated to first order.
inline EvalResult evaluate_at_roots(const DensityExpression& expr, const PartitionedGraphon& w,
                                    const std::vector<double>& rootx, long long samples,
                                    uint64_t seed) {
  const DecoratedGraph* h0 = expr.any_graph();
  expr.root_signature();
  if (h0 != nullptr) {
    if (int(rootx.size()) != h0->roots)
      throw InfeasibleRoots("expected " + std::to_string(h0->roots) + " roots");
    for (int i = 0; i < h0->roots; ++i) {
      detail::DecorationSampler s;
      if (!s.contains(w.table, h0->decorations[i], rootx[i]))
        throw InfeasibleRoots("root " + std::to_string(i) + " outside its decoration");
    }
    for (int i = 0; i < h0->roots; ++i)
      for (int j = i + 1; j < h0->roots; ++j) {
        if (h0->root_pair_free(i, j)) continue;
        double val = w.kernel->value(rootx[i], rootx[j]);
        if (h0->root_pair_edge(i, j) && !(val > 0.0))
          throw InfeasibleRoots("root edge with W = 0");
        if (!h0->root_pair_edge(i, j) && !(val < 1.0))
          throw InfeasibleRoots("root non-edge with W = 1");
      }
  }
  EvalResult out;
  double var = 0.0;
  uint64_t term_idx = 0;
  for (const auto& term : expr.terms()) {
    double prod = term.coeff.to_double();
    std::vector<double> means, ses;
    uint64_t factor_idx = 0;
    for (const auto& f : term.factors) {
      double mean = 0.0, se = 0.0;
      if (f.non_roots() == 0) {
        mean = 1.0;  // all vertices are roots: the conditional event is certain
      } else {
        Rng rng = Rng::stream(seed, (term_idx << 20) | (factor_idx << 1) | 1);
        detail::factor_estimate(*w.kernel, f, w.table, rootx, samples, rng, &mean, &se);
      }
      means.push_back(mean);
      ses.push_back(se);
      prod *= mean;
      ++factor_idx;
    }
    out.value += prod;
    // first-order error propagation through the factor product
    double term_var = 0.0;
    for (size_t i = 0; i < means.size(); ++i) {
      double partial = term.coeff.to_double();
      for (size_t j = 0; j < means.size(); ++j)
        if (j != i) partial *= means[j];
      term_var += partial * partial * ses[i] * ses[i];
    }
    var += term_var;
    ++term_idx;
  }
  out.std_error = std::sqrt(var);
  return out;
}

struct ConstraintReport {
  std::string name;
  int tuples = 0;
  long long samples = 0;
  double max_abs_deviation = 0.0;
  double max_excess = 0.0;  // max over tuples of |dev| - z * se
  double pooled_se = 0.0;
  double threshold_z = 0.0;
  bool passed = false;
  bool vacuous = false;
  std::string note;
};

// Samples feasible root tuples by rejection and evaluates left - right at
// each. The per-tuple noise allowance uses a familywise-corrected z so the
// false-failure rate stays near 0.2% per constraint regardless of the tuple
// count (at one tuple it reduces to the plain 3-sigma rule).
inline ConstraintReport check_constraint(const Constraint& c, const PartitionedGraphon& w,
                                         const CheckConfig& cfg = {}) {
  ConstraintReport rep;
  rep.name = c.name;
  rep.samples = cfg.samples;
  DensityExpression diff = c.difference();
  const DecoratedGraph* h0 = diff.any_graph();
  if (h0 == nullptr) {
    // scalar constraint: exact
    double total = 0.0;
    for (const auto& t : diff.terms()) total += t.coeff.to_double();
    rep.max_abs_deviation = std::abs(total);
    rep.passed = rep.max_abs_deviation <= cfg.tol_base;
    rep.note = "no decorated terms; exact evaluation";
    return rep;
  }
  int m = h0->roots;
  std::vector<detail::DecorationSampler> root_samplers;
  for (int i = 0; i < m; ++i) {
    auto s = detail::DecorationSampler::build(w.table, h0->decorations[i]);
    if (s.total <= 0.0) {
      rep.vacuous = true;
      rep.passed = true;
      rep.note = "root decoration has measure 0; constraint is vacuous";
      return rep;
    }
    root_samplers.push_back(std::move(s));
  }

  int requested = m == 0 ? 1 : cfg.tuples;
  std::vector<std::vector<double>> tuples;
  long long attempts = 0;
  Rng rng = Rng::stream(cfg.seed, 0xfea51b1e);
  while (int(tuples.size()) < requested) {
    if (++attempts > cfg.feasibility_budget)
      throw FeasibilitySamplingError("no feasible root tuple in " +
                                     std::to_string(cfg.feasibility_budget) + " attempts for " +
                                     c.name);
    std::vector<double> x(m);
    for (int i = 0; i < m; ++i) x[i] = root_samplers[i].sample(rng);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = i + 1; j < m && ok; ++j) {
        if (h0->root_pair_free(i, j)) continue;
        double val = w.kernel->value(x[i], x[j]);
        if (h0->root_pair_edge(i, j) ? !(val > 0.0) : !(val < 1.0)) ok = false;
      }
    if (ok) tuples.push_back(std::move(x));
  }

  rep.tuples = int(tuples.size());
  rep.threshold_z = two_sided_z(0.002 / double(tuples.size()));
  std::vector<EvalResult> results(tuples.size());
  parallel_chunks(int(tuples.size()), cfg.effective_workers(), [&](int i) {
    results[i] = evaluate_at_roots(diff, w, tuples[i], cfg.samples,
                                   cfg.seed ^ (0x9e3779b9ULL + uint64_t(i) * 0x100000001b3ULL));
  });
  double pooled = 0.0;
  rep.max_excess = -1e300;
  for (const auto& r : results) {
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(r.value));
    rep.max_excess = std::max(rep.max_excess, std::abs(r.value) - rep.threshold_z * r.std_error);
    pooled += r.std_error * r.std_error;
  }
  rep.pooled_se = std::sqrt(pooled / double(results.size()));
  rep.passed = rep.max_excess <= cfg.tol_base;
  return rep;
}

// Rewrites a constraint with set decorations into simple constraints: each
// multi-part root decoration is case split across its parts, and each
// multi-part non-root decoration becomes a measure-weighted convex
// combination.
inline std::vector<Constraint> expand_to_simple(const Constraint& c, const PartTable& table) {
  DensityExpression joint = c.left - c.right;  // validates compatibility
  joint.root_signature();
  const DecoratedGraph* h0 = c.left.any_graph();
  if (h0 == nullptr) h0 = c.right.any_graph();

  auto rewrite_roots = [&](const DensityExpression& e,
                           const std::vector<int>& root_parts) -> DensityExpression {
    DensityExpression out;
    for (const auto& t : e.terms()) {
      DecoratedTerm nt;
      nt.coeff = t.coeff;
      for (auto f : t.factors) {
        for (size_t i = 0; i < root_parts.size(); ++i) f.decorations[i] = {root_parts[i]};
        nt.factors.push_back(f);
      }
      out.add_term(std::move(nt));
    }
    return out;
  };

  // expand non-root set decorations to fixpoint inside one expression
  auto expand_nonroots = [&](DensityExpression e) -> DensityExpression {
    for (;;) {
      bool changed = false;
      DensityExpression next;
      for (const auto& t : e.terms()) {
        size_t fi = 0;
        int vi = -1;
        for (; fi < t.factors.size() && vi < 0; ++fi)
          for (int v = t.factors[fi].roots; v < t.factors[fi].order(); ++v)
            if (t.factors[fi].decorations[v].size() > 1) {
              vi = v;
              break;
            }
        if (vi < 0) {
          next.add_term(t);
          continue;
        }
        --fi;
        changed = true;
        const auto& dec = t.factors[fi].decorations[vi];
        Rational total(0);
        for (int id : dec) total += table.part(id).measure();
        if (total.is_zero())
          throw EmptyDecoration("decoration with zero total measure in expansion");
        for (int id : dec) {
          Rational weight = table.part(id).measure() / total;
          if (weight.is_zero()) continue;
          DecoratedTerm nt = t;
          nt.coeff = t.coeff * weight;
          nt.factors[fi].decorations[vi] = {id};
          next.add_term(std::move(nt));
        }
      }
      e = std::move(next);
      if (!changed) return e;
    }
  };

  std::vector<std::vector<int>> root_cases{{}};
  if (h0 != nullptr) {
    for (int i = 0; i < h0->roots; ++i) {
      std::vector<std::vector<int>> grown;
      for (const auto& partial : root_cases)
        for (int id : h0->decorations[i]) {
          if (table.part(id).measure().is_zero() && h0->decorations[i].size() > 1) continue;
          auto next = partial;
          next.push_back(id);
          grown.push_back(std::move(next));
        }
      root_cases = std::move(grown);
    }
  }

  std::vector<Constraint> out;
  int case_idx = 0;
  for (const auto& root_parts : root_cases) {
    Constraint simple;
    simple.name = c.name + (root_cases.size() > 1 ? "#" + std::to_string(case_idx++) : "");
    simple.left = expand_nonroots(rewrite_roots(c.left, root_parts));
    simple.right = expand_nonroots(rewrite_roots(c.right, root_parts));
    out.push_back(std::move(simple));
  }
  return out;
}

}  // namespace graphonlab
