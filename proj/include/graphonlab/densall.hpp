#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "graphonlab/rational.hpp"
#include "graphonlab/smallgraph.hpp"

namespace graphonlab {

// Formal polynomial with rational coefficients over connected graph
// indeterminates, ordered canonically for term merging.
class DensityPolynomial {
 public:
  struct Term {
    Rational coeff;
    std::vector<SmallGraph> graphs;  // canonical forms, sorted
  };

  static DensityPolynomial monomial(SmallGraph g, Rational coeff = Rational(1)) {
    DensityPolynomial p;
    p.terms_.push_back(Term{std::move(coeff), {canonical_form(g)}});
    return p;
  }

  static DensityPolynomial constant(Rational c) {
    DensityPolynomial p;
    if (!c.is_zero()) p.terms_.push_back(Term{std::move(c), {}});
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }

  DensityPolynomial& operator+=(const DensityPolynomial& o) {
    for (const auto& t : o.terms_) terms_.push_back(t);
    merge();
    return *this;
  }

  DensityPolynomial& scale(const Rational& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.coeff *= c;
    return *this;
  }

  friend DensityPolynomial operator*(const DensityPolynomial& a, const DensityPolynomial& b) {
    DensityPolynomial out;
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        Term t;
        t.coeff = ta.coeff * tb.coeff;
        t.graphs = ta.graphs;
        t.graphs.insert(t.graphs.end(), tb.graphs.begin(), tb.graphs.end());
        std::sort(t.graphs.begin(), t.graphs.end());
        out.terms_.push_back(std::move(t));
      }
    out.merge();
    return out;
  }

  std::vector<SmallGraph> indeterminates() const {
    std::vector<SmallGraph> out;
    for (const auto& t : terms_)
      for (const auto& g : t.graphs) out.push_back(g);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const SmallGraph& a, const SmallGraph& b) { return a == b; }),
              out.end());
    return out;
  }

  template <typename Num>
  Num evaluate(const std::function<Num(const SmallGraph&)>& density) const {
    Num total(0);
    for (const auto& t : terms_) {
      Num prod = term_coeff<Num>(t.coeff);
      for (const auto& g : t.graphs) prod = prod * density(g);
      total = total + prod;
    }
    return total;
  }

 private:
  template <typename Num>
  static Num term_coeff(const Rational& r);

  void merge() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      return graphs_key(a.graphs) < graphs_key(b.graphs);
    });
    std::vector<Term> merged;
    for (auto& t : terms_) {
      if (!merged.empty() && graphs_key(merged.back().graphs) == graphs_key(t.graphs))
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.coeff.is_zero(); }),
                 merged.end());
    terms_ = std::move(merged);
  }

  static std::vector<std::pair<int, uint64_t>> graphs_key(const std::vector<SmallGraph>& gs) {
    std::vector<std::pair<int, uint64_t>> key;
    for (const auto& g : gs) key.emplace_back(g.order(), g.encode());
    return key;
  }

  std::vector<Term> terms_;
};

template <>
inline Rational DensityPolynomial::term_coeff<Rational>(const Rational& r) {
  return r;
}
template <>
inline double DensityPolynomial::term_coeff<double>(const Rational& r) {
  return r.to_double();
}

namespace detail {

inline SmallGraph induced_subgraph(const SmallGraph& g, uint16_t mask) {
  std::array<int, SmallGraph::kMaxVertices> newlabel{};
  int count = 0;
  for (int v = 0; v < g.order(); ++v)
    if ((mask >> v) & 1u) newlabel[v] = count++;
  SmallGraph out(count);
  for (int u = 0; u < g.order(); ++u)
    for (int v = u + 1; v < g.order(); ++v)
      if (((mask >> u) & 1u) && ((mask >> v) & 1u) && g.has_edge(u, v))
        out.add_edge(newlabel[u], newlabel[v]);
  return out;
}

inline std::vector<uint16_t> component_masks(const SmallGraph& g) {
  std::vector<uint16_t> comps;
  uint16_t remaining = uint16_t((1u << g.order()) - 1);
  while (remaining) {
    int start = __builtin_ctz(remaining);
    uint16_t seen = uint16_t(1u << start);
    uint16_t frontier = seen;
    while (frontier) {
      uint16_t next = 0;
      for (int v = 0; v < g.order(); ++v)
        if ((frontier >> v) & 1u) next |= g.neighbors(v);
      frontier = next & ~seen;
      seen |= next;
    }
    comps.push_back(seen);
    remaining &= ~seen;
  }
  return comps;
}

inline long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// Expresses d(H, W) as a polynomial in densities of connected graphs on at
// most |H| vertices, by recursion on the number of components: the product
// d(H')d(H'') expands over all order-n graphs into binomially weighted terms,
// all of which except H itself have fewer components.
inline DensityPolynomial densall_decompose(const SmallGraph& h_in) {
  if (h_in.order() > 8) throw SizeError("densall_decompose supports at most 8 vertices");
  static std::map<std::pair<int, uint64_t>, DensityPolynomial> cache;
  SmallGraph h = canonical_form(h_in);
  auto key = std::make_pair(h.order(), h.encode());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  DensityPolynomial result;
  auto comps = detail::component_masks(h);
  if (comps.size() <= 1) {
    result = DensityPolynomial::monomial(h);
  } else {
    int n = h.order();
    SmallGraph h1 = detail::induced_subgraph(h, comps[0]);
    uint16_t rest_mask = 0;
    for (size_t c = 1; c < comps.size(); ++c) rest_mask |= comps[c];
    SmallGraph h2 = detail::induced_subgraph(h, rest_mask);
    int n1 = h1.order();

    // Count, per order-n class G, the vertex splits realizing (H', H'').
    long long n_h = 0;
    std::vector<std::pair<SmallGraph, long long>> others;
    for (const auto& g : enumerate_all(n)) {
      long long count = 0;
      for (uint16_t mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != n1) continue;
        if (isomorphic(detail::induced_subgraph(g, mask), h1) &&
            isomorphic(detail::induced_subgraph(g, uint16_t(~mask & ((1u << n) - 1))), h2))
          ++count;
      }
      if (count == 0) continue;
      if (isomorphic(g, h))
        n_h = count;
      else
        others.emplace_back(g, count);
    }

    Rational choose = Rational(detail::binomial(n, n1));
    result = densall_decompose(h1) * densall_decompose(h2);
    result.scale(choose / Rational(n_h));
    for (const auto& [g, count] : others) {
      DensityPolynomial part = densall_decompose(g);
      part.scale(-Rational(count) / Rational(n_h));
      result += part;
    }
  }
  cache[key] = result;
  return result;
}

}  // namespace graphonlab
