#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphonlab/decorated.hpp"
#include "graphonlab/universal.hpp"

namespace graphonlab {

struct UnknownSuite : std::invalid_argument {
  explicit UnknownSuite(const std::string& what) : std::invalid_argument(what) {}
};

struct SuiteParams {
  // degrees of the embedded 10-part kernel's parts, for the alignment suite
  std::map<std::string, Rational> ckm_degrees;
};

namespace suites_detail {

// Small builder DSL over the construction's part table.
class Builder {
 public:
  explicit Builder(const UniversalGraphon& u) : u_(u) {}

  using Dec = std::vector<int>;

  Dec one(int id) const { return {id}; }
  Dec group(const std::vector<int>& ids) const { return ids; }
  Dec e_star() const { return u_.e_ids; }
  Dec f_star() const { return u_.f_ids; }
  Dec c_star() const { return u_.c_ids; }
  Dec d_star() const { return u_.d_ids; }
  Dec a_star() const { return u_.a_ids; }
  Dec bg_star() const { return u_.bg_ids; }
  Dec b_star() const {
    Dec out = u_.b_other_ids;
    out.insert(out.end(), u_.bg_ids.begin(), u_.bg_ids.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  Dec g1() const { return {u_.g1_id}; }
  Dec g2() const { return {u_.g2_id}; }

  // Decorated graph from an edge list; decs has one decoration per vertex.
  static DecoratedGraph make(int n, int roots, const std::vector<std::pair<int, int>>& edges,
                             const std::vector<Dec>& decs,
                             const std::vector<std::pair<int, int>>& free_pairs = {}) {
    DecoratedGraph g;
    g.graph = SmallGraph(n);
    for (auto [a, b] : edges) g.graph.add_edge(a, b);
    g.roots = roots;
    g.decorations = decs;
    for (auto [a, b] : free_pairs) g.free_root_pairs.insert({std::min(a, b), std::max(a, b)});
    g.validate();
    return g;
  }

  // Sum of the 2^k variants of `base` over the listed unconstrained pairs:
  // enumerating both edge states marginalizes the pair.
  static DensityExpression marginalize(const DecoratedGraph& base,
                                       const std::vector<std::pair<int, int>>& undrawn,
                                       Rational coeff = Rational(1)) {
    DensityExpression out;
    size_t k = undrawn.size();
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
      DecoratedGraph variant = base;
      for (size_t b = 0; b < k; ++b)
        if ((mask >> b) & 1u) variant.graph.add_edge(undrawn[b].first, undrawn[b].second);
      out += DensityExpression::graph(variant, coeff);
    }
    return out;
  }

  Constraint equals_zero(const std::string& name, DensityExpression lhs) const {
    Constraint c;
    c.name = name;
    c.left = std::move(lhs);
    c.right = DensityExpression::scalar(Rational(0));
    return c;
  }
  Constraint equals(const std::string& name, DensityExpression lhs, Rational value) const {
    Constraint c;
    c.name = name;
    c.left = std::move(lhs);
    c.right = DensityExpression::scalar(std::move(value));
    return c;
  }

  const UniversalGraphon& u_;
};

}  // namespace suites_detail

// deg^{F_*} of a vertex of part X is off + width * t in group-relative units;
// these constants parameterize the positional identities below.
struct GroupCoords {
  Rational off;
  Rational width;
};

inline GroupCoords f_coords_of_part(const UniversalGraphon& u, int id) {
  const auto& table = u.table();
  const auto& p = table.part(id);
  std::vector<int> ids;
  if (p.group == 'A')
    ids = u.a_ids;
  else if (p.name.rfind("BG", 0) == 0)
    ids = u.bg_ids;
  else if (p.group == 'C')
    ids = u.c_ids;
  else if (p.group == 'D')
    ids = u.d_ids;
  else if (p.group == 'E')
    ids = u.e_ids;
  else if (p.group == 'F')
    ids = u.f_ids;
  else
    throw std::invalid_argument("part " + p.name + " has no coordinate group");
  Rational group_lo = table.part(ids.front()).lo;
  Rational group_len = table.part(ids.back()).hi - group_lo;
  return GroupCoords{(p.lo - group_lo) / group_len, p.measure() / group_len};
}

// ---- suite builders ----

inline std::vector<Constraint> build_suite(const std::string& name, const UniversalGraphon& u,
                                           const SuiteParams& params = {});

namespace suites_detail {

inline std::vector<Constraint> coordinate_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  int M = u.big_m;
  // zero tiles F_i x F_j below the antidiagonal, both orientations
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j) {
      if (i + j > M) continue;
      int fi = u.f_ids[i - 1], fj = u.f_ids[j - 1];
      out.push_back(b.equals_zero(
          "coordinate/f5a[" + std::to_string(i) + "," + std::to_string(j) + "]",
          DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(fi), b.one(fj)}))));
      out.push_back(b.equals_zero(
          "coordinate/f5b[" + std::to_string(i) + "," + std::to_string(j) + "]",
          DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(fj), b.one(fi)}))));
    }
  // one tiles above the antidiagonal (missing-edge probability vanishes)
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j) {
      if (i + j < M + 2) continue;
      int fi = u.f_ids[i - 1], fj = u.f_ids[j - 1];
      out.push_back(b.equals_zero(
          "coordinate/f5c[" + std::to_string(i) + "," + std::to_string(j) + "]",
          DensityExpression::graph(Builder::make(2, 1, {}, {b.one(fi), b.one(fj)}))));
    }
  // B-block parts other than BG see nothing of the coordinate column
  for (int id : u.b_other_ids)
    out.push_back(b.equals_zero(
        "coordinate/f5d[" + u.table().part(id).name + "]",
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), b.f_star()}))));

  // nested neighbourhoods, degree agreement and part ordering against F
  struct GroupRef {
    std::string tag;
    std::vector<int> ids;
  };
  std::vector<GroupRef> groups{{"A", u.a_ids},
                               {"BG", u.bg_ids},
                               {"C", u.c_ids},
                               {"D", u.d_ids},
                               {"E", u.e_ids}};
  for (const auto& g : groups) {
    Builder::Dec star = b.group(g.ids);
    DecoratedGraph left = Builder::make(3, 2, {{0, 2}}, {b.f_star(), b.f_star(), star}, {{0, 1}});
    DecoratedGraph right = Builder::make(3, 2, {{1, 2}}, {b.f_star(), b.f_star(), star}, {{0, 1}});
    DensityExpression prod =
        DensityExpression::graph(left) * DensityExpression::graph(right);
    out.push_back(b.equals_zero("coordinate/f6a[" + g.tag + "]", std::move(prod)));

    DensityExpression deg_f =
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.f_star(), b.f_star()}));
    DensityExpression deg_x =
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.f_star(), star}));
    out.push_back(b.equals_zero("coordinate/f6b[" + g.tag + "]", deg_f - deg_x));

    for (size_t i = 0; i < g.ids.size(); ++i)
      for (size_t j = i + 1; j < g.ids.size(); ++j) {
        DecoratedGraph order = Builder::make(
            3, 2, {{0, 2}}, {b.one(g.ids[i]), b.one(g.ids[j]), b.f_star()}, {{0, 1}});
        out.push_back(b.equals_zero("coordinate/f6c[" + g.tag + "," + std::to_string(i + 1) +
                                        "," + std::to_string(j + 1) + "]",
                                    DensityExpression::graph(order)));
      }
  }
  return out;
}

inline std::vector<Constraint> ckm_align_suite(const UniversalGraphon& u,
                                               const SuiteParams& params) {
  Builder b(u);
  std::vector<Constraint> out;
  auto degree_of = [&](const std::string& key) -> Rational {
    auto it = params.ckm_degrees.find(key);
    if (it == params.ckm_degrees.end())
      throw std::invalid_argument("ckm_align needs a degree for part " + key);
    return it->second;
  };
  const char* letters = "ABCDEFPQR";
  for (int i = 0; i < 9; ++i) {
    std::string part_name = std::string("B") + letters[i];
    int id = u.table().index_of(part_name);
    DensityExpression deg =
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), b.b_star()}));
    out.push_back(
        b.equals("ckm/align[" + part_name + "]", std::move(deg), degree_of(std::string(1, letters[i]))));
  }
  DensityExpression deg_g =
      DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.bg_star(), b.b_star()}));
  out.push_back(b.equals("ckm/align[BG]", std::move(deg_g), degree_of("G")));
  return out;
}

inline void append_position_identity(std::vector<Constraint>& out, const Builder& b,
                                     const std::string& name, const Builder::Dec& root_dec,
                                     const Builder::Dec& column_dec, const GroupCoords& coords) {
  // U - a*S - b*S + (3/2) b S^2 = 0 where S is the column measure seen from
  // the root and U adds one F-vertex reading the column's position.
  Builder::Dec f = b.f_star();
  DecoratedGraph s_graph = Builder::make(2, 1, {{0, 1}}, {root_dec, column_dec});
  DensityExpression s = DensityExpression::graph(s_graph);
  DecoratedGraph u_base = Builder::make(3, 1, {{0, 1}, {1, 2}}, {root_dec, column_dec, f});
  DensityExpression u_expr = Builder::marginalize(u_base, {{0, 2}});
  DensityExpression lhs = u_expr;
  lhs += DensityExpression::graph(s_graph, -(coords.off + coords.width));
  lhs += (s * s) * DensityExpression::scalar(coords.width * rat(3, 2));
  out.push_back(b.equals_zero(name, std::move(lhs)));
}

inline std::vector<Constraint> checker_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  Builder::Dec e = b.e_star();
  Builder::Dec f = b.f_star();

  // the E x E block structure
  out.push_back(b.equals_zero(
      "checker/equiv",
      DensityExpression::graph(Builder::make(3, 2, {{0, 1}, {0, 2}}, {e, e, e}))));
  {
    DecoratedGraph with_both = Builder::make(3, 2, {{0, 1}, {0, 2}, {1, 2}}, {e, e, e});
    DensityExpression lhs = DensityExpression::graph(with_both);
    lhs += Builder::marginalize(Builder::make(3, 2, {{0, 1}, {0, 2}}, {e, e, e}), {{1, 2}},
                                Rational(-1));
    out.push_back(b.equals_zero("checker/zero-one", std::move(lhs)));
  }
  {
    // block length equals one minus its upper end: U = S - (3/2) S^2
    DecoratedGraph s_graph = Builder::make(2, 1, {{0, 1}}, {e, e});
    DensityExpression s = DensityExpression::graph(s_graph);
    DensityExpression u_expr =
        Builder::marginalize(Builder::make(3, 1, {{0, 1}, {1, 2}}, {e, e, f}), {{0, 2}});
    DensityExpression lhs = u_expr - s;
    lhs += (s * s) * DensityExpression::scalar(rat(3, 2));
    out.push_back(b.equals_zero("checker/block-end", std::move(lhs)));
  }
  out.push_back(b.equals(
      "checker/blocksum",
      DensityExpression::graph(Builder::make(2, 0, {{0, 1}}, {e, e})), rat(1, 3)));

  // columns against E: one family per referenced part or group
  struct Ref {
    std::string tag;
    Builder::Dec dec;
    int coord_part;  // part id whose F-coordinates parameterize the identity,
                     // or -1 for a full group (offset 0, width 1)
  };
  std::vector<Ref> refs;
  for (int id : u.a_ids) refs.push_back({u.table().part(id).name, b.one(id), id});
  for (int id : u.bg_ids) refs.push_back({u.table().part(id).name, b.one(id), id});
  refs.push_back({"C", b.c_star(), -1});
  refs.push_back({"D", b.d_star(), -1});
  refs.push_back({"E", b.e_star(), -1});
  for (const auto& rf : refs) {
    out.push_back(b.equals_zero(
        "checker/col[" + rf.tag + "]",
        DensityExpression::graph(Builder::make(3, 2, {{0, 1}, {0, 2}}, {e, e, rf.dec}))));
    DensityExpression width_x =
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {e, rf.dec}));
    DensityExpression width_e = DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {e, e}));
    out.push_back(b.equals_zero("checker/width[" + rf.tag + "]", width_x - width_e));
    GroupCoords coords{Rational(0), Rational(1)};
    if (rf.coord_part >= 0) coords = f_coords_of_part(u, rf.coord_part);
    append_position_identity(out, b, "checker/pos[" + rf.tag + "]", e, rf.dec, coords);
  }
  for (int id : u.b_other_ids)
    out.push_back(b.equals_zero(
        "checker/zero[" + u.table().part(id).name + "]",
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), e}))));
  return out;
}

inline std::vector<Constraint> exp_checker_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  Builder::Dec c = b.c_star();
  Builder::Dec d = b.d_star();
  Builder::Dec e = b.e_star();
  for (const auto& [tag, star, power] :
       {std::tuple<std::string, Builder::Dec, int>{"C", c, 2},
        std::tuple<std::string, Builder::Dec, int>{"D", d, 3}}) {
    out.push_back(b.equals_zero(
        "expchk/equiv[" + tag + "]",
        DensityExpression::graph(Builder::make(3, 2, {{0, 1}, {0, 2}}, {star, star, star}))));
    {
      DensityExpression lhs = DensityExpression::graph(
          Builder::make(3, 2, {{0, 1}, {0, 2}, {1, 2}}, {star, star, star}));
      lhs += Builder::marginalize(Builder::make(3, 2, {{0, 1}, {0, 2}}, {star, star, star}),
                                  {{1, 2}}, Rational(-1));
      out.push_back(b.equals_zero("expchk/zero-one[" + tag + "]", std::move(lhs)));
    }
    {
      // block width = 2 |I_s|^2 on C, 4 |I_s|^3 on D; |I_s| read through E
      DensityExpression self =
          DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {star, star}));
      DensityExpression e_width =
          DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {star, e}));
      DensityExpression rhs = e_width;
      for (int p = 1; p < power; ++p) rhs = rhs * e_width;
      rhs = rhs * DensityExpression::scalar(pow2(power - 1));
      out.push_back(b.equals_zero("expchk/len[" + tag + "]", self - rhs));
    }
  }
  out.push_back(b.equals_zero(
      "expchk/cd-col",
      DensityExpression::graph(Builder::make(3, 2, {{0, 1}, {1, 2}}, {c, d, c}))));
  {
    DensityExpression via_c = DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {c, c}));
    DensityExpression via_d = DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {c, d}));
    out.push_back(b.equals_zero("expchk/cd-width", via_c - via_d));
  }
  return out;
}

inline std::vector<Constraint> dyadic_ref_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  struct YZ {
    std::string tag;
    Builder::Dec y;
    Builder::Dec z;
  };
  std::vector<YZ> yzs{{"C", b.c_star(), b.e_star()}, {"D", b.d_star(), b.c_star()}};
  std::vector<int> xs = u.a_ids;
  xs.insert(xs.end(), u.bg_ids.begin(), u.bg_ids.end());
  for (const auto& yz : yzs) {
    for (int x : xs) {
      std::string nm = u.table().part(x).name + "," + yz.tag;
      out.push_back(b.equals_zero(
          "dyref/col[" + nm + "]",
          DensityExpression::graph(
              Builder::make(3, 2, {{0, 1}, {0, 2}}, {yz.y, yz.y, b.one(x)}))));
      {
        DecoratedGraph same_z =
            Builder::make(3, 2, {{0, 2}, {1, 2}}, {yz.y, yz.y, yz.z});
        DecoratedGraph same_col =
            Builder::make(3, 2, {{0, 2}, {1, 2}}, {yz.y, yz.y, b.one(x)});
        out.push_back(b.equals_zero(
            "dyref/disjoint[" + nm + "]",
            DensityExpression::graph(same_z) * DensityExpression::graph(same_col)));
      }
      {
        DensityExpression col =
            DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {yz.y, b.one(x)}));
        DensityExpression lvl =
            DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {yz.y, b.e_star()}));
        out.push_back(
            b.equals_zero("dyref/width[" + nm + "]", col - lvl * DensityExpression::scalar(2)));
      }
    }
  }
  for (int id : u.b_other_ids) {
    out.push_back(b.equals_zero(
        "dyref/zero[" + u.table().part(id).name + ",C]",
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), b.c_star()}))));
    out.push_back(b.equals_zero(
        "dyref/zero[" + u.table().part(id).name + ",D]",
        DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), b.d_star()}))));
  }
  return out;
}

inline std::vector<Constraint> density_transfer_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  int M = u.big_m;
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j) {
      int ai = u.a_ids[i - 1], aj = u.a_ids[j - 1];
      int bi = u.bg_ids[i - 1], bj = u.bg_ids[j - 1];
      auto side = [&](int pi, int pj) {
        // adjacent C and D roots select a dyadic square; the two column
        // vertices read it off the referenced parts and the W_F edge weights it
        DecoratedGraph base =
            Builder::make(4, 2, {{0, 1}, {0, 2}, {1, 3}, {2, 3}},
                          {b.c_star(), b.d_star(), b.one(pi), b.one(pj)});
        return Builder::marginalize(base, {{0, 3}, {1, 2}});
      };
      Constraint c;
      c.name = "transfer/square[" + std::to_string(i) + "," + std::to_string(j) + "]";
      c.left = side(ai, aj);
      c.right = side(bi, bj);
      out.push_back(std::move(c));
    }
  {
    auto cycle_term = [&](const Builder::Dec& star) {
      DecoratedGraph base = Builder::make(4, 0, {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
                                          {star, star, star, star});
      return Builder::marginalize(base, {{0, 2}, {1, 3}});
    };
    Constraint c;
    c.name = "transfer/tc4";
    c.left = cycle_term(b.a_star());
    c.right = cycle_term(b.bg_star());
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Constraint> balancing_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  const auto& table = u.table();
  for (size_t i = 0; i < table.size(); ++i) {
    int id = int(i);
    if (id == u.g1_id || id == u.g2_id || table.part(id).measure().is_zero()) continue;
    const std::string& nm = table.part(id).name;
    // second moment of the column over X, constant over G1 pairs
    DecoratedGraph pair = Builder::make(3, 2, {{0, 2}, {1, 2}}, {b.g1(), b.g1(), b.one(id)},
                                        {{0, 1}});
    out.push_back(
        b.equals("balance/sq[" + nm + "]", DensityExpression::graph(pair),
                 u.balance_sq_int[i]));
    DecoratedGraph mean = Builder::make(2, 1, {{0, 1}}, {b.g1(), b.one(id)});
    out.push_back(b.equals("balance/mean[" + nm + "]", DensityExpression::graph(mean),
                           u.balance_int[i]));
  }
  // pointwise pre-degree identity: |G1| deg^{G1}(x) + sum_Y |Y| deg^Y(x) = pdeg(X)
  for (size_t i = 0; i < table.size(); ++i) {
    int id = int(i);
    if (id == u.g1_id || id == u.g2_id || table.part(id).measure().is_zero()) continue;
    const std::string& nm = table.part(id).name;
    DensityExpression lhs;
    auto add_column = [&](const Builder::Dec& dec) {
      Rational weight(0);
      for (int pid : dec) weight += table.part(pid).measure();
      if (weight.is_zero()) return;
      lhs += DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.one(id), dec}), weight);
    };
    add_column(b.g1());
    add_column(b.a_star());
    add_column(b.b_star());
    add_column(b.c_star());
    add_column(b.d_star());
    add_column(b.e_star());
    add_column(b.f_star());
    out.push_back(b.equals("balance/predeg[" + nm + "]", std::move(lhs),
                           table.part(id).pre_degree));
  }
  out.push_back(b.equals("balance/rho",
                         DensityExpression::graph(Builder::make(2, 1, {{0, 1}}, {b.g1(), b.g1()})),
                         u.rho));
  return out;
}

inline std::vector<Constraint> distinguishing_suite(const UniversalGraphon& u) {
  Builder b(u);
  std::vector<Constraint> out;
  const auto& table = u.table();
  for (size_t i = 0; i < table.size(); ++i) {
    int id = int(i);
    const std::string& nm = table.part(id).name;
    Rational value = u.g2_column_value(id);
    DecoratedGraph mean = Builder::make(2, 1, {{0, 1}}, {b.one(id), b.g2()});
    out.push_back(b.equals("disting/mean[" + nm + "]", DensityExpression::graph(mean), value));
    DecoratedGraph pair = Builder::make(3, 2, {{0, 2}, {1, 2}}, {b.one(id), b.one(id), b.g2()},
                                        {{0, 1}});
    out.push_back(b.equals("disting/sq[" + nm + "]", DensityExpression::graph(pair),
                           value * value));
  }
  return out;
}

}  // namespace suites_detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "ckm_align",        "coordinate", "checker",   "exp_checker",
      "dyadic_ref",       "density_transfer", "balancing", "distinguishing"};
  return names;
}

inline std::vector<Constraint> build_suite(const std::string& name, const UniversalGraphon& u,
                                           const SuiteParams& params) {
  using namespace suites_detail;
  if (name == "coordinate") return coordinate_suite(u);
  if (name == "ckm_align") return ckm_align_suite(u, params);
  if (name == "checker") return checker_suite(u);
  if (name == "exp_checker") return exp_checker_suite(u);
  if (name == "dyadic_ref") return dyadic_ref_suite(u);
  if (name == "density_transfer") return density_transfer_suite(u);
  if (name == "balancing") return balancing_suite(u);
  if (name == "distinguishing") return distinguishing_suite(u);
  throw UnknownSuite("unknown suite '" + name + "'");
}

// Mean degrees of the mock embedded kernel's parts, the default parameters
// for the alignment suite. Only the input-carrying part and its half-kernel
// neighbour have nonzero (and non-constant) degrees in the stand-in.
inline SuiteParams default_ckm_params(const StepGraphon& wf) {
  SuiteParams p;
  Rational edge2(0);  // integral of deg_wf = twice the edge density
  for (size_t i = 0; i < wf.parts(); ++i) edge2 += wf.measure(i) * wf.part_degree(i);
  for (const char* key : {"A", "B", "C", "D", "E", "F", "Q", "R"})
    p.ckm_degrees[key] = Rational(0);
  p.ckm_degrees["G"] = (edge2 + rat(1, 2)) / Rational(14);
  p.ckm_degrees["P"] = rat(1, 28);
  return p;
}

}  // namespace graphonlab
