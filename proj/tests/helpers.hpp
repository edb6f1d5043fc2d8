#pragma once

// Test-only oracles, deliberately written as literal translations of the
// definitions and kept independent of the library's computation paths.

#include <vector>

#include "graphonlab/rng.hpp"
#include "graphonlab/smallgraph.hpp"
#include "graphonlab/step.hpp"

namespace testutil {

using namespace graphonlab;

inline StepPtr random_step(int parts, uint64_t seed, int value_den = 16) {
  Rng rng(seed);
  std::vector<Rational> measures;
  long long total = 0;
  std::vector<long long> weights;
  for (int i = 0; i < parts; ++i) {
    long long w = 1 + (long long)rng.below(8);
    weights.push_back(w);
    total += w;
  }
  for (long long w : weights) measures.push_back(Rational(w, total));
  std::vector<std::vector<Rational>> values(parts, std::vector<Rational>(parts));
  for (int i = 0; i < parts; ++i)
    for (int j = i; j < parts; ++j) {
      Rational v((long long)rng.below(value_den + 1), value_den);
      values[i][j] = v;
      values[j][i] = v;
    }
  return step_graphon(measures, values);
}

// All part assignments via an odometer; no pruning, no recursion.
template <typename Fn>
void for_each_assignment(int n, int k, Fn fn) {
  std::vector<int> a(n, 0);
  for (;;) {
    fn(a);
    int pos = n - 1;
    while (pos >= 0 && a[pos] == k - 1) a[pos--] = 0;
    if (pos < 0) return;
    ++a[pos];
  }
}

inline Rational brute_hom(const SmallGraph& h, const StepGraphon& w) {
  Rational total(0);
  auto edges = h.edges();
  for_each_assignment(h.order(), int(w.parts()), [&](const std::vector<int>& a) {
    Rational term(1);
    for (int v = 0; v < h.order(); ++v) term *= w.measure(a[v]);
    for (auto [u, v] : edges) term *= w.block(a[u], a[v]);
    total += term;
  });
  return total;
}

// Induced density straight from the definition: enumerate every labelled
// graph on n vertices, keep those isomorphic to H (by explicit permutation
// search), and sum their sampling probabilities.
inline Rational brute_induced(const SmallGraph& h, const StepGraphon& w) {
  int n = h.order();
  int pairs = n * (n - 1) / 2;
  Rational total(0);
  for (uint64_t bits = 0; bits < (1ULL << pairs); ++bits) {
    SmallGraph g = SmallGraph::decode(n, bits);
    bool iso = false;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    do {
      bool match = true;
      for (int u = 0; u < n && match; ++u)
        for (int v = u + 1; v < n && match; ++v)
          if (g.has_edge(u, v) != h.has_edge(perm[u], perm[v])) match = false;
      if (match) iso = true;
    } while (!iso && std::next_permutation(perm.begin(), perm.end()));
    if (!iso) continue;
    for_each_assignment(n, int(w.parts()), [&](const std::vector<int>& a) {
      Rational term(1);
      for (int v = 0; v < n; ++v) term *= w.measure(a[v]);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          Rational val = w.block(a[u], a[v]);
          term *= g.has_edge(u, v) ? val : Rational(1) - val;
        }
      total += term;
    });
  }
  return total;
}

// Maximum measure of a part subset with all block values (incl. diagonal) 1,
// by exhaustive subset enumeration.
inline Rational brute_omega(const StepGraphon& w) {
  size_t k = w.parts();
  if (k > 20) throw std::invalid_argument("brute_omega supports at most 20 parts");
  Rational best(0);
  for (uint32_t mask = 0; mask < (1u << k); ++mask) {
    bool ok = true;
    Rational weight(0);
    for (size_t i = 0; i < k && ok; ++i) {
      if (!((mask >> i) & 1u)) continue;
      weight += w.measure(i);
      for (size_t j = i; j < k && ok; ++j)
        if ((mask >> j) & 1u && w.block(i, j) != Rational(1)) ok = false;
    }
    if (ok && weight > best) best = weight;
  }
  return best;
}

}  // namespace testutil
