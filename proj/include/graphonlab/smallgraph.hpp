#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphonlab {

struct SizeError : std::invalid_argument {
  explicit SizeError(const std::string& what) : std::invalid_argument(what) {}
};

struct GraphParseError : std::invalid_argument {
  size_t position;
  GraphParseError(const std::string& what, size_t pos)
      : std::invalid_argument(what + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

// Simple loop-free graph on vertices 0..n-1, n <= 12.
class SmallGraph {
 public:
  static constexpr int kMaxVertices = 12;

  SmallGraph() = default;
  explicit SmallGraph(int n) : n_(n) {
    if (n < 0 || n > kMaxVertices)
      throw SizeError("vertex count " + std::to_string(n) + " out of range [0,12]");
    adj_.fill(0);
  }

  int order() const { return n_; }

  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw std::invalid_argument("loops are not allowed");
    adj_[u] |= uint16_t(1u << v);
    adj_[v] |= uint16_t(1u << u);
  }

  bool has_edge(int u, int v) const { return (adj_[u] >> v) & 1u; }
  uint16_t neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return __builtin_popcount(adj_[v]); }

  int edge_count() const {
    int total = 0;
    for (int v = 0; v < n_; ++v) total += degree(v);
    return total / 2;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v)
        if (has_edge(u, v)) out.emplace_back(u, v);
    return out;
  }

  bool connected() const {
    if (n_ == 0) return true;
    uint16_t seen = 1;
    uint16_t frontier = 1;
    while (frontier) {
      uint16_t next = 0;
      for (int v = 0; v < n_; ++v)
        if ((frontier >> v) & 1u) next |= adj_[v];
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == uint16_t((1u << n_) - 1);
  }

  SmallGraph relabel(const std::array<int, kMaxVertices>& perm) const {
    // perm maps old label -> new label.
    SmallGraph out(n_);
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v)
        if (has_edge(u, v)) out.add_edge(perm[u], perm[v]);
    return out;
  }

  // Upper-triangle bit encoding, row-major; total order on same-n graphs.
  uint64_t encode() const {
    uint64_t bits = 0;
    int k = 0;
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v, ++k)
        if (has_edge(u, v)) bits |= (1ULL << k);
    return bits;
  }

  static SmallGraph decode(int n, uint64_t bits) {
    SmallGraph g(n);
    int k = 0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v, ++k)
        if ((bits >> k) & 1ULL) g.add_edge(u, v);
    return g;
  }

  friend bool operator==(const SmallGraph& a, const SmallGraph& b) {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }
  friend bool operator<(const SmallGraph& a, const SmallGraph& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.encode() < b.encode();
  }

  // Text format "n:u-v,u-v,...", e.g. "4:0-1,1-2,2-3,3-0".
  static SmallGraph parse(const std::string& text) {
    size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void { throw GraphParseError(msg, pos); };
    auto read_int = [&]() -> int {
      size_t start = pos;
      while (pos < text.size() && isdigit((unsigned char)text[pos])) ++pos;
      if (pos == start) fail("expected a number");
      return std::stoi(text.substr(start, pos - start));
    };
    int n = read_int();
    if (n < 1 || n > kMaxVertices) fail("vertex count out of range [1,12]");
    SmallGraph g(n);
    if (pos == text.size()) return g;
    if (text[pos] != ':') fail("expected ':'");
    ++pos;
    if (pos == text.size()) return g;
    for (;;) {
      int u = read_int();
      if (pos == text.size() || text[pos] != '-') fail("expected '-'");
      ++pos;
      int v = read_int();
      if (u >= n || v >= n) fail("vertex id out of range");
      if (u == v) fail("loops are not allowed");
      if (g.has_edge(u, v)) fail("duplicate edge");
      g.add_edge(u, v);
      if (pos == text.size()) break;
      if (text[pos] != ',') fail("expected ','");
      ++pos;
    }
    return g;
  }

  std::string str() const {
    std::string out = std::to_string(n_) + ":";
    bool first = true;
    for (auto [u, v] : edges()) {
      if (!first) out += ",";
      first = false;
      out += std::to_string(u) + "-" + std::to_string(v);
    }
    return out;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= n_) throw std::invalid_argument("vertex out of range");
  }

  int n_ = 0;
  std::array<uint16_t, kMaxVertices> adj_{};
};

namespace detail {

// Backtracking search for the relabeling maximizing the adjacency encoding.
// Prunes a branch as soon as its row chunk falls below the best known prefix.
class CanonSearch {
 public:
  explicit CanonSearch(const SmallGraph& g) : g_(g), n_(g.order()) {}

  std::array<int, SmallGraph::kMaxVertices> run() {
    perm_of_new_.fill(-1);
    rec(0, 0, /*tight=*/true);
    return best_inv_;
  }

 private:
  // chunk for new position p given candidate old-vertex v: bit (p-1-j) is
  // adjacency to the vertex already placed at new position j.
  uint16_t chunk(int p, int v) const {
    uint16_t c = 0;
    for (int j = 0; j < p; ++j)
      if (g_.has_edge(v, perm_of_new_[j])) c |= uint16_t(1u << (p - 1 - j));
    return c;
  }

  void rec(int p, int used, bool tight) {
    if (p == n_) {
      bool better = !have_best_;
      if (!better && !tight) {
        for (int j = 0; j < n_; ++j) {
          if (cur_chunk_[j] != best_chunk_[j]) {
            better = cur_chunk_[j] > best_chunk_[j];
            break;
          }
        }
      }
      if (better) {
        for (int j = 0; j < n_; ++j) best_chunk_[j] = cur_chunk_[j];
        for (int j = 0; j < n_; ++j) best_inv_[perm_of_new_[j]] = j;
        have_best_ = true;
      }
      return;
    }
    for (int v = 0; v < n_; ++v) {
      if ((used >> v) & 1) continue;
      uint16_t c = chunk(p, v);
      bool t = tight && have_best_;
      if (t) {
        if (c < best_chunk_[p]) continue;
        if (c > best_chunk_[p]) t = false;
      }
      perm_of_new_[p] = v;
      cur_chunk_[p] = c;
      rec(p + 1, used | (1 << v), t);
    }
  }

  const SmallGraph& g_;
  int n_;
  std::array<int, SmallGraph::kMaxVertices> perm_of_new_{};
  std::array<int, SmallGraph::kMaxVertices> best_inv_{};
  std::array<uint16_t, SmallGraph::kMaxVertices> cur_chunk_{};
  std::array<uint16_t, SmallGraph::kMaxVertices> best_chunk_{};
  bool have_best_ = false;
};

}  // namespace detail

inline SmallGraph canonical_form(const SmallGraph& g) {
  if (g.order() > 8) throw SizeError("canonical_form supports at most 8 vertices");
  if (g.order() <= 1) return g;
  detail::CanonSearch search(g);
  return g.relabel(search.run());
}

inline bool isomorphic(const SmallGraph& a, const SmallGraph& b) {
  if (a.order() != b.order() || a.edge_count() != b.edge_count()) return false;
  int n = a.order();
  std::vector<int> da(n), db(n);
  for (int v = 0; v < n; ++v) da[v] = a.degree(v), db[v] = b.degree(v);
  {
    auto sa = da, sb = db;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  // Map vertices of a onto b one at a time.
  std::array<int, SmallGraph::kMaxVertices> map{};
  map.fill(-1);
  int used = 0;
  auto rec = [&](auto&& self, int u) -> bool {
    if (u == n) return true;
    for (int w = 0; w < n; ++w) {
      if ((used >> w) & 1) continue;
      if (da[u] != db[w]) continue;
      bool ok = true;
      for (int u2 = 0; u2 < u && ok; ++u2)
        if (a.has_edge(u, u2) != b.has_edge(w, map[u2])) ok = false;
      if (!ok) continue;
      map[u] = w;
      used |= 1 << w;
      if (self(self, u + 1)) return true;
      used &= ~(1 << w);
      map[u] = -1;
    }
    return false;
  };
  return rec(rec, 0);
}

inline long long automorphism_count(const SmallGraph& g) {
  int n = g.order();
  if (n <= 1) return 1;
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  long long count = 0;
  std::array<int, SmallGraph::kMaxVertices> map{};
  int used = 0;
  auto rec = [&](auto&& self, int u) -> void {
    if (u == n) {
      ++count;
      return;
    }
    for (int w = 0; w < n; ++w) {
      if ((used >> w) & 1) continue;
      if (deg[u] != deg[w]) continue;
      bool ok = true;
      for (int u2 = 0; u2 < u && ok; ++u2)
        if (g.has_edge(u, u2) != g.has_edge(w, map[u2])) ok = false;
      if (!ok) continue;
      map[u] = w;
      used |= 1 << w;
      self(self, u + 1);
      used &= ~(1 << w);
    }
  };
  rec(rec, 0);
  return count;
}

// All distinct labelled graphs isomorphic to g (as edge encodings).
inline std::vector<uint64_t> labelled_copies(const SmallGraph& g) {
  int n = g.order();
  if (n > 8) throw SizeError("labelled_copies supports at most 8 vertices");
  std::set<uint64_t> seen;
  std::array<int, SmallGraph::kMaxVertices> perm{};
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<int> p(perm.begin(), perm.begin() + n);
  std::sort(p.begin(), p.end());
  do {
    for (int i = 0; i < n; ++i) perm[i] = p[i];
    seen.insert(g.relabel(perm).encode());
  } while (std::next_permutation(p.begin(), p.end()));
  return {seen.begin(), seen.end()};
}

// One representative per isomorphism class of graphs on exactly n vertices,
// built by extending the (n-1)-vertex classes. Cached per n.
inline const std::vector<SmallGraph>& enumerate_all(int n) {
  if (n < 1 || n > 8) throw SizeError("enumerate_all supports 1..8 vertices");
  static std::array<std::vector<SmallGraph>, 9> cache;
  if (!cache[n].empty()) return cache[n];
  if (n == 1) {
    cache[1] = {SmallGraph(1)};
    return cache[1];
  }
  const auto& prev = enumerate_all(n - 1);
  std::set<uint64_t> seen;
  std::vector<SmallGraph> out;
  for (const auto& base : prev) {
    for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
      SmallGraph g(n);
      for (auto [u, v] : base.edges()) g.add_edge(u, v);
      for (int v = 0; v < n - 1; ++v)
        if ((mask >> v) & 1u) g.add_edge(v, n - 1);
      SmallGraph c = canonical_form(g);
      if (seen.insert(c.encode()).second) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const SmallGraph& a, const SmallGraph& b) {
    if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
    return a.encode() < b.encode();
  });
  cache[n] = std::move(out);
  return cache[n];
}

// Connected isomorphism classes with orders in [2, n], canonical order.
inline std::vector<SmallGraph> enumerate_connected(int n) {
  if (n < 2 || n > 8) throw SizeError("enumerate_connected supports 2..8 vertices");
  std::vector<SmallGraph> out;
  for (int k = 2; k <= n; ++k)
    for (const auto& g : enumerate_all(k))
      if (g.connected()) out.push_back(g);
  return out;
}

inline SmallGraph complete_graph(int n) {
  SmallGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

inline SmallGraph cycle_graph(int n) {
  SmallGraph g(n);
  for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

inline SmallGraph path_graph(int n) {
  SmallGraph g(n);
  for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

}  // namespace graphonlab
