#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphonlab/parttable.hpp"
#include "graphonlab/rational.hpp"
#include "graphonlab/smallgraph.hpp"

namespace graphonlab {

struct CompatibilityError : std::invalid_argument {
  explicit CompatibilityError(const std::string& what) : std::invalid_argument(what) {}
};

// Rooted graph whose vertices carry part-set decorations. Roots are vertices
// 0..roots-1, labelled by their index. A root pair may be marked "free":
// neither an edge nor a non-edge is required for feasibility, so one
// constraint covers both cases at once.
struct DecoratedGraph {
  SmallGraph graph;
  int roots = 0;
  std::vector<std::vector<int>> decorations;  // sorted part ids per vertex
  std::set<std::pair<int, int>> free_root_pairs;

  int order() const { return graph.order(); }
  int non_roots() const { return graph.order() - roots; }

  void validate() const {
    if (roots < 0 || roots > graph.order())
      throw std::invalid_argument("root count out of range");
    if (int(decorations.size()) != graph.order())
      throw std::invalid_argument("decoration count mismatch");
    for (const auto& d : decorations)
      if (d.empty()) throw std::invalid_argument("empty decoration set");
    for (auto [u, v] : free_root_pairs)
      if (!(u < v && v < roots))
        throw std::invalid_argument("free pair must join two distinct roots");
  }

  bool root_pair_edge(int i, int j) const { return graph.has_edge(i, j); }
  bool root_pair_free(int i, int j) const {
    return free_root_pairs.count({std::min(i, j), std::max(i, j)}) != 0;
  }

  // Root-induced signature: the compatibility key shared by all graphs in a
  // constraint (root count, root decorations, per-pair edge/non-edge/free).
  std::string root_signature() const {
    std::string sig = std::to_string(roots) + "|";
    for (int v = 0; v < roots; ++v) {
      for (int id : decorations[v]) sig += std::to_string(id) + ",";
      sig += ";";
    }
    for (int i = 0; i < roots; ++i)
      for (int j = i + 1; j < roots; ++j)
        sig += root_pair_free(i, j) ? 'f' : (root_pair_edge(i, j) ? 'e' : 'n');
    return sig;
  }

  // Canonical relabeling of the non-root vertices, so that syntactically
  // different spellings of the same decorated graph compare equal.
  DecoratedGraph canonical() const {
    int n = graph.order();
    int k = non_roots();
    if (k <= 1) return *this;
    std::vector<int> order_map(k);
    for (int i = 0; i < k; ++i) order_map[i] = i;
    DecoratedGraph best = *this;
    std::string best_key;
    bool first = true;
    do {
      std::array<int, SmallGraph::kMaxVertices> perm{};
      for (int v = 0; v < roots; ++v) perm[v] = v;
      for (int i = 0; i < k; ++i) perm[roots + i] = roots + order_map[i];
      DecoratedGraph candidate;
      candidate.graph = graph.relabel(perm);
      candidate.roots = roots;
      candidate.decorations.resize(n);
      for (int v = 0; v < n; ++v) candidate.decorations[perm[v]] = decorations[v];
      candidate.free_root_pairs = free_root_pairs;
      std::string key = candidate.key();
      if (first || key < best_key) {
        best = candidate;
        best_key = std::move(key);
        first = false;
      }
    } while (std::next_permutation(order_map.begin(), order_map.end()));
    return best;
  }

  std::string key() const {
    std::string k = std::to_string(graph.order()) + "/" + std::to_string(roots) + "/" +
                    std::to_string(graph.encode()) + "/";
    for (const auto& d : decorations) {
      for (int id : d) k += std::to_string(id) + ",";
      k += ";";
    }
    for (auto [u, v] : free_root_pairs) k += std::to_string(u) + "-" + std::to_string(v) + "!";
    return k;
  }

  friend bool operator==(const DecoratedGraph& a, const DecoratedGraph& b) {
    return a.key() == b.key();
  }
};

// One monomial of a decorated density expression: coeff * product of graphs.
struct DecoratedTerm {
  Rational coeff{1};
  std::vector<DecoratedGraph> factors;

  std::string key() const {
    std::vector<std::string> keys;
    for (const auto& f : factors) keys.push_back(f.key());
    std::sort(keys.begin(), keys.end());
    std::string out;
    for (const auto& k : keys) out += k + "#";
    return out;
  }
};

// Formal polynomial in mutually compatible decorated graphs. A term with no
// factors is a scalar.
class DensityExpression {
 public:
  DensityExpression() = default;

  static DensityExpression scalar(Rational c) {
    DensityExpression e;
    e.add_term(DecoratedTerm{std::move(c), {}});
    return e;
  }
  static DensityExpression graph(DecoratedGraph g, Rational coeff = Rational(1)) {
    DensityExpression e;
    g.validate();
    e.add_term(DecoratedTerm{std::move(coeff), {g.canonical()}});
    return e;
  }

  void add_term(DecoratedTerm term) {
    for (auto& f : term.factors) f = f.canonical();
    terms_.push_back(std::move(term));
    merge();
  }

  const std::vector<DecoratedTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  DensityExpression& operator+=(const DensityExpression& o) {
    for (const auto& t : o.terms_) terms_.push_back(t);
    merge();
    return *this;
  }
  DensityExpression operator-() const {
    DensityExpression out = *this;
    for (auto& t : out.terms_) t.coeff = -t.coeff;
    return out;
  }
  friend DensityExpression operator-(const DensityExpression& a, const DensityExpression& b) {
    DensityExpression out = a;
    out += -b;
    return out;
  }
  friend DensityExpression operator*(const DensityExpression& a, const DensityExpression& b) {
    DensityExpression out;
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        DecoratedTerm t;
        t.coeff = ta.coeff * tb.coeff;
        t.factors = ta.factors;
        t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
        out.terms_.push_back(std::move(t));
      }
    out.merge();
    return out;
  }

  // The shared root signature; throws if graphs are not mutually compatible.
  std::string root_signature() const {
    std::string sig;
    bool found = false;
    for (const auto& t : terms_)
      for (const auto& f : t.factors) {
        if (!found) {
          sig = f.root_signature();
          found = true;
        } else if (f.root_signature() != sig) {
          throw CompatibilityError("decorated graphs with different root signatures");
        }
      }
    return sig;
  }

  // Some factor graph, to read the shared root structure from.
  const DecoratedGraph* any_graph() const {
    for (const auto& t : terms_)
      if (!t.factors.empty()) return &t.factors.front();
    return nullptr;
  }

 private:
  void merge() {
    std::sort(terms_.begin(), terms_.end(),
              [](const DecoratedTerm& a, const DecoratedTerm& b) { return a.key() < b.key(); });
    std::vector<DecoratedTerm> merged;
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().key() == t.key())
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const DecoratedTerm& t) { return t.coeff.is_zero(); }),
                 merged.end());
    terms_ = std::move(merged);
  }

  std::vector<DecoratedTerm> terms_;
};

struct Constraint {
  std::string name;
  DensityExpression left;
  DensityExpression right;

  DensityExpression difference() const { return left - right; }

  void validate() const {
    DensityExpression diff = left - right;
    diff.root_signature();  // throws on incompatibility
  }
};

}  // namespace graphonlab
