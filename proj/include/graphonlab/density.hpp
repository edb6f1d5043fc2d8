#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "graphonlab/interval.hpp"
#include "graphonlab/kernel.hpp"
#include "graphonlab/parallel.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/smallgraph.hpp"
#include "graphonlab/step.hpp"

namespace graphonlab {

struct DensityReport {
  double estimate = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::string method = "exact";
};

struct McConfig {
  uint64_t seed = 1;
  long long samples = 1'000'000;
  int workers = 0;  // 0 = default_workers()

  int effective_workers() const { return workers > 0 ? workers : default_workers(); }
};

namespace detail {

// Sum over part assignments of mu-weight times the edge/non-edge product for
// one labelled graph given as an edge bitmask (upper-triangle encoding).
// Recursion over vertices; prunes branches whose partial product is zero.
template <typename Num>
Num assignment_sum(const StepGraphon& w, int n, uint64_t edge_mask, bool use_nonedges,
                   const std::vector<Num>& mu, const std::vector<std::vector<Num>>& val) {
  size_t k = w.parts();
  std::vector<int> assign(n, 0);
  // pair index of (u,v), u<v, in the upper-triangle encoding
  auto pair_bit = [n](int u, int v) {
    int idx = 0;
    for (int a = 0; a < u; ++a) idx += n - 1 - a;
    return idx + (v - u - 1);
  };
  Num total(0);
  Num one(1);
  auto rec = [&](auto&& self, int vtx, Num partial) -> void {
    if (vtx == n) {
      total += partial;
      return;
    }
    for (size_t p = 0; p < k; ++p) {
      Num factor = partial * mu[p];
      if (factor == Num(0)) continue;
      bool dead = false;
      for (int u = 0; u < vtx && !dead; ++u) {
        bool edge = (edge_mask >> pair_bit(u, vtx)) & 1ULL;
        if (edge) {
          factor = factor * val[assign[u]][p];
        } else if (use_nonedges) {
          factor = factor * (one - val[assign[u]][p]);
        }
        if (factor == Num(0)) dead = true;
      }
      if (dead) continue;
      assign[vtx] = int(p);
      self(self, vtx + 1, factor);
    }
  };
  rec(rec, 0, one);
  return total;
}

inline std::vector<Rational> mu_rational(const StepGraphon& w) { return w.measures(); }
inline std::vector<std::vector<Rational>> val_rational(const StepGraphon& w) {
  std::vector<std::vector<Rational>> v(w.parts(), std::vector<Rational>(w.parts()));
  for (size_t i = 0; i < w.parts(); ++i)
    for (size_t j = 0; j < w.parts(); ++j) v[i][j] = w.block(i, j);
  return v;
}
inline std::vector<double> mu_double(const StepGraphon& w) {
  std::vector<double> m;
  for (const auto& r : w.measures()) m.push_back(r.to_double());
  return m;
}
inline std::vector<std::vector<double>> val_double(const StepGraphon& w) {
  std::vector<std::vector<double>> v(w.parts(), std::vector<double>(w.parts()));
  for (size_t i = 0; i < w.parts(); ++i)
    for (size_t j = 0; j < w.parts(); ++j) v[i][j] = w.block_d(i, j);
  return v;
}

}  // namespace detail

// ---- exact step-graphon densities ----

inline Rational hom_density_rational(const SmallGraph& h, const StepGraphon& w) {
  return detail::assignment_sum<Rational>(w, h.order(), h.encode(), /*use_nonedges=*/false,
                                          detail::mu_rational(w), detail::val_rational(w));
}

inline double hom_density_double(const SmallGraph& h, const StepGraphon& w) {
  return detail::assignment_sum<double>(w, h.order(), h.encode(), false, detail::mu_double(w),
                                        detail::val_double(w));
}

inline Rational induced_density_rational(const SmallGraph& h, const StepGraphon& w) {
  Rational total(0);
  auto mu = detail::mu_rational(w);
  auto val = detail::val_rational(w);
  for (uint64_t enc : labelled_copies(h))
    total += detail::assignment_sum<Rational>(w, h.order(), enc, true, mu, val);
  return total;
}

inline double induced_density_double(const SmallGraph& h, const StepGraphon& w) {
  KahanSum total;
  auto mu = detail::mu_double(w);
  auto val = detail::val_double(w);
  for (uint64_t enc : labelled_copies(h))
    total.add(detail::assignment_sum<double>(w, h.order(), enc, true, mu, val));
  return total.value();
}

inline Rational t_c4_rational(const StepGraphon& w) {
  return hom_density_rational(cycle_graph(4), w);
}

// ---- Monte Carlo ----

namespace detail {

constexpr long long kChunk = 16384;

// Runs fn(rng, out_sum, out_sumsq) over fixed-size sample chunks with one
// seeded stream per chunk; reduction order is fixed, so the result depends
// only on (seed, samples), not on scheduling.
template <typename PerSample>
DensityReport mc_mean(const McConfig& cfg, PerSample per_sample) {
  long long n = cfg.samples;
  int chunks = int((n + kChunk - 1) / kChunk);
  std::vector<double> sums(chunks, 0.0), sumsqs(chunks, 0.0);
  parallel_chunks(chunks, cfg.effective_workers(), [&](int c) {
    Rng rng = Rng::stream(cfg.seed, uint64_t(c));
    long long lo = c * kChunk;
    long long hi = std::min(n, lo + kChunk);
    KahanSum s, s2;
    for (long long i = lo; i < hi; ++i) {
      double v = per_sample(rng);
      s.add(v);
      s2.add(v * v);
    }
    sums[c] = s.value();
    sumsqs[c] = s2.value();
  });
  KahanSum s, s2;
  for (int c = 0; c < chunks; ++c) {
    s.add(sums[c]);
    s2.add(sumsqs[c]);
  }
  double mean = s.value() / double(n);
  double var = std::max(0.0, s2.value() / double(n) - mean * mean);
  DensityReport rep;
  rep.estimate = mean;
  rep.std_error = std::sqrt(var / double(n));
  rep.samples = n;
  rep.method = "monte_carlo";
  return rep;
}

}  // namespace detail

inline DensityReport hom_density_mc(const SmallGraph& h, const Kernel& w, const McConfig& cfg) {
  int n = h.order();
  auto edges = h.edges();
  return detail::mc_mean(cfg, [&](Rng& rng) {
    double x[SmallGraph::kMaxVertices];
    for (int i = 0; i < n; ++i) x[i] = rng.uniform();
    double prod = 1.0;
    for (auto [u, v] : edges) {
      prod *= w.value(x[u], x[v]);
      if (prod == 0.0) break;
    }
    return prod;
  });
}

inline DensityReport induced_density_mc(const SmallGraph& h, const Kernel& w,
                                        const McConfig& cfg) {
  int n = h.order();
  if (n <= 7) {
    // Conditional estimator: exact probability given the sampled points.
    auto copies = labelled_copies(h);
    return detail::mc_mean(cfg, [&, copies](Rng& rng) {
      double x[SmallGraph::kMaxVertices];
      for (int i = 0; i < n; ++i) x[i] = rng.uniform();
      double pair_val[SmallGraph::kMaxVertices][SmallGraph::kMaxVertices];
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pair_val[u][v] = w.value(x[u], x[v]);
      double total = 0.0;
      for (uint64_t enc : copies) {
        double prod = 1.0;
        int bit = 0;
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v, ++bit) {
            if (prod == 0.0) continue;
            prod *= ((enc >> bit) & 1ULL) ? pair_val[u][v] : 1.0 - pair_val[u][v];
          }
        total += prod;
      }
      return total;
    });
  }
  // Indicator estimator for larger graphs: sample the random graph, test
  // isomorphism.
  return detail::mc_mean(cfg, [&](Rng& rng) {
    double x[SmallGraph::kMaxVertices];
    for (int i = 0; i < n; ++i) x[i] = rng.uniform();
    SmallGraph g(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < w.value(x[u], x[v])) g.add_edge(u, v);
    return isomorphic(g, h) ? 1.0 : 0.0;
  });
}

// ---- public operations (dispatch exact vs Monte Carlo) ----

// Rational arithmetic is used within the scale where the assignment sum stays
// cheap; beyond it the exact path switches to compensated double summation.
inline bool step_exact_rational_ok(const StepGraphon& w, int order) {
  return w.parts() <= 5 && order <= 6;
}

inline DensityReport hom_density(const SmallGraph& h, const Kernel& w, const McConfig& cfg = {}) {
  if (const auto* step = dynamic_cast<const StepGraphon*>(&w)) {
    DensityReport rep;
    rep.estimate = step_exact_rational_ok(*step, h.order())
                       ? hom_density_rational(h, *step).to_double()
                       : hom_density_double(h, *step);
    return rep;
  }
  return hom_density_mc(h, w, cfg);
}

inline DensityReport induced_density(const SmallGraph& h, const Kernel& w,
                                     const McConfig& cfg = {}) {
  if (const auto* step = dynamic_cast<const StepGraphon*>(&w)) {
    DensityReport rep;
    rep.estimate = step_exact_rational_ok(*step, h.order())
                       ? induced_density_rational(h, *step).to_double()
                       : induced_density_double(h, *step);
    return rep;
  }
  return induced_density_mc(h, w, cfg);
}

inline DensityReport t_c4(const Kernel& w, const McConfig& cfg = {}) {
  return hom_density(cycle_graph(4), w, cfg);
}

// Integral of W over A x B (not normalized).
inline DensityReport pair_density(const Kernel& w, const std::vector<Interval>& a,
                                  const std::vector<Interval>& b, const McConfig& cfg = {}) {
  if (const auto* step = dynamic_cast<const StepGraphon*>(&w)) {
    DensityReport rep;
    rep.estimate = step->pair_density_exact(a, b).to_double();
    return rep;
  }
  double ma = 0.0, mb = 0.0;
  for (const auto& i : a) ma += i.length().to_double();
  for (const auto& i : b) mb += i.length().to_double();
  if (ma == 0.0 || mb == 0.0) return DensityReport{};
  auto pick = [](Rng& rng, const std::vector<Interval>& set, double total) {
    double u = rng.uniform() * total;
    for (const auto& i : set) {
      double len = i.length().to_double();
      if (u < len) return i.lo.to_double() + u;
      u -= len;
    }
    return set.back().hi.to_double() - 1e-12;
  };
  DensityReport rep = detail::mc_mean(cfg, [&](Rng& rng) {
    return w.value(pick(rng, a, ma), pick(rng, b, mb));
  });
  rep.estimate *= ma * mb;
  rep.std_error *= ma * mb;
  return rep;
}

inline DensityReport degree(const Kernel& w, double x, const McConfig& cfg = {}) {
  double exact = 0.0;
  if (w.row_integral(x, 0.0, 1.0, &exact)) {
    DensityReport rep;
    rep.estimate = exact;
    return rep;
  }
  return detail::mc_mean(cfg, [&](Rng& rng) { return w.value(x, rng.uniform()); });
}

// Degree relative to a union of intervals (normalized by its measure).
inline DensityReport rel_degree(const Kernel& w, double x, const std::vector<Interval>& parts,
                                const McConfig& cfg = {}) {
  double total = 0.0;
  for (const auto& i : parts) total += i.length().to_double();
  if (total == 0.0) throw std::invalid_argument("relative degree over a null set");
  double sum = 0.0;
  bool exact = true;
  for (const auto& i : parts) {
    double piece = 0.0;
    if (!w.row_integral(x, i.lo.to_double(), i.hi.to_double(), &piece)) {
      exact = false;
      break;
    }
    sum += piece;
  }
  if (exact) {
    DensityReport rep;
    rep.estimate = sum / total;
    return rep;
  }
  auto pick = [&](Rng& rng) {
    double u = rng.uniform() * total;
    for (const auto& i : parts) {
      double len = i.length().to_double();
      if (u < len) return i.lo.to_double() + u;
      u -= len;
    }
    return parts.back().hi.to_double() - 1e-12;
  };
  return detail::mc_mean(cfg, [&](Rng& rng) { return w.value(x, pick(rng)); });
}

// W-random graph with adjacency bit rows (order may exceed SmallGraph's cap).
struct RandomGraph {
  int n = 0;
  std::vector<std::vector<uint64_t>> rows;

  bool has_edge(int u, int v) const { return (rows[u][v >> 6] >> (v & 63)) & 1ULL; }
  long long edge_count() const {
    long long total = 0;
    for (const auto& row : rows)
      for (uint64_t word : row) total += __builtin_popcountll(word);
    return total / 2;
  }
  SmallGraph to_small() const {
    SmallGraph g(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (has_edge(u, v)) g.add_edge(u, v);
    return g;
  }
};

// N x N grid average of a kernel as a step graphon: the admission path for
// inputs that are not already step functions. Cells with a closed-form
// rectangle integral are exact; the rest are Monte-Carlo averages on seeded
// per-cell streams (deterministic, and exact rationals either way since
// doubles are dyadic).
inline StepPtr grid_graphon(const Kernel& w, int n, uint64_t seed = 1,
                            long long cell_samples = 4096) {
  if (n < 1) throw std::invalid_argument("grid size must be >= 1");
  std::vector<Rational> measures(n, Rational(1, n));
  std::vector<std::vector<Rational>> values(n, std::vector<Rational>(n));
  Rational cell_area = Rational(1, n) * Rational(1, n);
  for (int i = 0; i < n; ++i) {
    Interval xi(Rational(i, n), Rational(i + 1, n));
    for (int j = i; j < n; ++j) {
      Interval yj(Rational(j, n), Rational(j + 1, n));
      Rational avg;
      Rational integral;
      if (w.rect_integral(xi, yj, &integral)) {
        avg = integral / cell_area;
      } else {
        Rng rng = Rng::stream(seed, uint64_t(i) * 100003ULL + uint64_t(j));
        KahanSum sum;
        for (long long s = 0; s < cell_samples; ++s) {
          double x = xi.lo.to_double() + rng.uniform() / n;
          double y = yj.lo.to_double() + rng.uniform() / n;
          sum.add(w.value(x, y));
        }
        double mean = std::clamp(sum.value() / double(cell_samples), 0.0, 1.0);
        avg = Rational::from_double_exact(mean);
      }
      values[i][j] = avg;
      values[j][i] = avg;
    }
  }
  return step_graphon(std::move(measures), std::move(values));
}

inline RandomGraph sample_w_random(const Kernel& w, int k, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("order must be >= 1");
  Rng rng = Rng::stream(seed, 0);
  std::vector<double> x(k);
  for (int i = 0; i < k; ++i) x[i] = rng.uniform();
  RandomGraph g;
  g.n = k;
  g.rows.assign(k, std::vector<uint64_t>((k + 63) / 64, 0));
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v)
      if (rng.uniform() < w.value(x[u], x[v])) {
        g.rows[u][v >> 6] |= 1ULL << (v & 63);
        g.rows[v][u >> 6] |= 1ULL << (u & 63);
      }
  return g;
}

}  // namespace graphonlab
