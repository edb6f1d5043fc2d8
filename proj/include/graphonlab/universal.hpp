#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "graphonlab/density.hpp"
#include "graphonlab/parttable.hpp"
#include "graphonlab/step.hpp"
#include "graphonlab/tiled.hpp"

namespace graphonlab {

struct DegreeOneError : std::invalid_argument {
  explicit DegreeOneError(const std::string& what) : std::invalid_argument(what) {}
};
struct BalanceRangeError : std::runtime_error {
  explicit BalanceRangeError(const std::string& what) : std::runtime_error(what) {}
};

// ---- input normalization ----

struct NormalizedInput {
  int r = 1;
  Rational epsilon;  // 1/(2^r + 1)
  StepPtr wf;
};

inline Rational admissible_epsilon(int r) { return Rational(1) / (pow2(r) + Rational(1)); }

// Largest epsilon = 1/(2^r+1) <= eps_request; the input is shrunk into the
// top-left (1-eps_request)/(1-eps) box (a zero part is appended) so that both
// the box identity and the degree cap hold after rescaling.
inline NormalizedInput normalize_input(StepPtr wf, const Rational& eps_request) {
  if (!(Rational(0) < eps_request && eps_request < Rational(1)))
    throw std::invalid_argument("epsilon request must lie in (0,1)");
  int r = 1;
  while (admissible_epsilon(r) > eps_request) ++r;
  NormalizedInput out;
  out.r = r;
  out.epsilon = admissible_epsilon(r);

  Rational shrink = (Rational(1) - eps_request) / (Rational(1) - out.epsilon);
  if (shrink == Rational(1)) {
    out.wf = std::move(wf);
    return out;
  }
  // measures scale by `shrink`; the remainder becomes an isolated part
  std::vector<Rational> measures;
  for (const auto& mu : wf->measures()) measures.push_back(mu * shrink);
  measures.push_back(Rational(1) - shrink);
  size_t k = wf->parts();
  std::vector<std::vector<Rational>> values(k + 1, std::vector<Rational>(k + 1, Rational(0)));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) values[i][j] = wf->block(i, j);
  out.wf = step_graphon(std::move(measures), std::move(values));
  return out;
}

// ---- monotone reordering ----

struct ReorderedInput {
  StepPtr wf;                        // parts sorted by degree
  std::vector<Rational> q_measures;  // M bucket measures (entries may be 0)
};

// Sorts parts by exact degree and buckets them into Q_k = {degree in
// [(k-1)/M, k/M)}. Step inputs have constant per-part degrees, so no part
// ever straddles a bucket boundary.
inline ReorderedInput monotone_reorder(StepPtr wf, int big_m) {
  size_t k = wf->parts();
  std::vector<Rational> degrees(k);
  for (size_t i = 0; i < k; ++i) {
    degrees[i] = wf->part_degree(i);
    if (degrees[i] >= Rational(1))
      throw DegreeOneError("part " + std::to_string(i) + " has degree " + degrees[i].str());
  }
  std::vector<size_t> order(k);
  for (size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return degrees[a] < degrees[b]; });
  std::vector<Rational> measures(k);
  std::vector<std::vector<Rational>> values(k, std::vector<Rational>(k));
  for (size_t i = 0; i < k; ++i) {
    measures[i] = wf->measure(order[i]);
    for (size_t j = 0; j < k; ++j) values[i][j] = wf->block(order[i], order[j]);
  }
  ReorderedInput out;
  out.wf = step_graphon(std::move(measures), std::move(values));
  out.q_measures.assign(big_m, Rational(0));
  Rational m_rat(big_m);
  for (size_t i = 0; i < k; ++i) {
    Rational scaled = degrees[order[i]] * m_rat;
    long long bucket = (long long)std::floor(scaled.to_double());
    // guard against double rounding at exact rational boundaries
    while (Rational(bucket + 1) <= scaled) ++bucket;
    while (Rational(bucket) > scaled) --bucket;
    out.q_measures[size_t(bucket)] += out.wf->measure(i);
  }
  return out;
}

// ---- part table (sizes and pre-degrees) ----

namespace detail {

inline std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int candidate = 2; int(primes.size()) < count; ++candidate) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(candidate);
  }
  return primes;
}

}  // namespace detail

// Degree offsets delta_X in (eps/8, eps/4), one per part, derived from the
// fractional parts of square roots of consecutive primes. True rational
// independence is a real-number property; what the construction uses is that
// all realized degrees are distinct, which is asserted downstream.
inline std::vector<double> assign_deltas(int count, const Rational& epsilon) {
  auto primes = detail::first_primes(count);
  double eps = epsilon.to_double();
  std::vector<double> deltas;
  for (int i = 0; i < count; ++i) {
    double root = std::sqrt(double(primes[i]));
    double frac = root - std::floor(root);
    deltas.push_back(eps / 8.0 * (1.0 + frac));
  }
  return deltas;
}

inline PartTable build_part_table(int r, const std::vector<Rational>& q_measures) {
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  Rational eps = admissible_epsilon(r);
  int big_m = 4 * (1 << r);  // M = 4(1/eps - 1) = 2^{r+2}
  int small_m = r + 2;       // m = log2 M
  if (int(q_measures.size()) != big_m)
    throw std::invalid_argument("expected " + std::to_string(big_m) + " bucket measures");
  Rational q_total(0);
  for (const auto& q : q_measures) q_total += q;
  if (q_total != Rational(1)) throw MeasureSumError("bucket measures must sum to 1");

  Rational one_minus = Rational(1) - eps;
  Rational b_unit = eps / Rational(20) / Rational(14);
  PartTable t;
  Rational cursor(0);
  auto push = [&](const std::string& name, char group, const Rational& measure,
                  const Rational& pre_degree, bool has_pd) {
    PartTable::Part p;
    p.name = name;
    p.group = group;
    p.lo = cursor;
    cursor += measure;
    p.hi = cursor;
    p.pre_degree = pre_degree;
    p.has_pre_degree = has_pd;
    t.add(std::move(p));
  };

  for (int k = 1; k <= big_m; ++k)
    push("A" + std::to_string(k), 'A', one_minus * q_measures[k - 1],
         eps * Rational(k + 1) / Rational(4), true);
  for (char c : {'A', 'B', 'C', 'D', 'E', 'F'})
    push(std::string("B") + c, 'B', b_unit, eps / Rational(4), true);
  for (int k = 1; k <= big_m; ++k)
    push("BG" + std::to_string(k), 'B', b_unit * q_measures[k - 1], eps / Rational(4), true);
  push("BP", 'B', b_unit, eps / Rational(4), true);
  push("BQ", 'B', b_unit * Rational(5), eps / Rational(4), true);
  push("BR", 'B', b_unit, eps / Rational(4), true);
  for (int k = 1; k <= small_m; ++k)
    push("C" + std::to_string(k), 'C', eps / Rational(20) * pow2(-k),
         one_minus * pow2(-(k - 1)) + eps / Rational(4), true);
  push("Cinf", 'C', eps / Rational(20) * pow2(-small_m),
       one_minus * pow2(-small_m) + eps / Rational(4), true);
  for (int k = 1; k <= small_m; ++k)
    push("D" + std::to_string(k), 'D', eps / Rational(20) * pow2(-k),
         one_minus * pow2(-(k - 1)) + eps / Rational(4), true);
  push("Dinf", 'D', eps / Rational(20) * pow2(-small_m),
       one_minus * pow2(-small_m) + eps / Rational(4), true);
  for (int k = 1; k <= small_m - 1; ++k)
    push("E" + std::to_string(k), 'E', eps / Rational(20) * pow2(-k),
         one_minus * pow2(-k) + eps / Rational(4), true);
  push("Einf", 'E', eps / Rational(20) * pow2(-(small_m - 1)),
       one_minus * pow2(-small_m) + eps / Rational(4), true);
  for (int k = 1; k <= big_m; ++k)
    push("F" + std::to_string(k), 'F', eps / Rational(20) / Rational(big_m),
         eps * Rational(k + 1) / Rational(4), true);
  push("G1", 'G', eps / Rational(2), Rational(0), false);
  push("G2", 'G', eps / Rational(4), Rational(0), false);
  t.finalize();

  auto deltas = assign_deltas(int(t.size()), eps);
  PartTable out;
  for (size_t i = 0; i < t.size(); ++i) {
    PartTable::Part p = t.part(int(i));
    p.delta = deltas[i];
    out.add(std::move(p));
  }
  out.finalize();
  return out;
}

// ---- tile kernels specific to the construction ----

// Referencing tile between a part X and the C_* (direct) or D_* (modular)
// column group: value(u, w) = 1 iff the level-s dyadic interval containing u
// matches the index encoded by w inside its level band.
class DyadicRefKernel final : public Kernel {
 public:
  enum class Variant { direct, modular };

  DyadicRefKernel(Variant variant, int depth) : variant_(variant), depth_(depth) {}

  double value(double u, double w) const override {
    int s = detail_level(w);
    if (s > depth_) return 0.0;
    double len = std::ldexp(1.0, -s);
    double lo = 1.0 - 2.0 * len;
    double relpos = (w - lo) / len;
    double cells = std::ldexp(1.0, s - 1);
    double tpos = relpos;
    if (variant_ == Variant::modular) {
      double scaled = relpos * cells;
      tpos = scaled - std::floor(scaled);
    }
    return std::floor(u * cells) == std::floor(tpos * cells) ? 1.0 : 0.0;
  }

  std::string descriptor() const override {
    return variant_ == Variant::direct ? "dyadic-ref(direct)" : "dyadic-ref(modular)";
  }

  bool column_integral(double lo, double hi, double w, double* out) const override {
    int s = detail_level(w);
    if (s > depth_) {
      *out = 0.0;
      return true;
    }
    double len = std::ldexp(1.0, -s);
    double band_lo = 1.0 - 2.0 * len;
    double relpos = (w - band_lo) / len;
    double cells = std::ldexp(1.0, s - 1);
    double tpos = relpos;
    if (variant_ == Variant::modular) {
      double scaled = relpos * cells;
      tpos = scaled - std::floor(scaled);
    }
    double cell = std::floor(tpos * cells);
    double a = cell / cells, b = (cell + 1.0) / cells;
    *out = std::max(0.0, std::min(hi, b) - std::max(lo, a));
    return true;
  }

 private:
  int detail_level(double w) const { return detail::checker_level(w, depth_); }

  Variant variant_;
  int depth_;
};

// Piecewise-affine function of the part-relative coordinate t in [0,1),
// with exact rational pieces.
struct PiecewiseAffine {
  struct Piece {
    Rational lo, hi;  // half-open in t
    Rational a, b;    // value = a + b*t
  };
  std::vector<Piece> pieces;

  static PiecewiseAffine constant(const Rational& c) {
    return PiecewiseAffine{{Piece{Rational(0), Rational(1), c, Rational(0)}}};
  }
  static PiecewiseAffine affine(const Rational& a, const Rational& b) {
    return PiecewiseAffine{{Piece{Rational(0), Rational(1), a, b}}};
  }

  const Piece& piece_at(const Rational& t) const {
    if (pieces.empty()) throw std::logic_error("piecewise function with no pieces");
    for (const auto& p : pieces)
      if (p.lo <= t && t < p.hi) return p;
    return pieces.back();
  }

  Rational eval(const Rational& t) const {
    const Piece& p = piece_at(t);
    return p.a + p.b * t;
  }

  PiecewiseAffine plus(const PiecewiseAffine& o) const {
    std::vector<Rational> cuts;
    for (const auto& p : pieces) {
      cuts.push_back(p.lo);
      cuts.push_back(p.hi);
    }
    for (const auto& p : o.pieces) {
      cuts.push_back(p.lo);
      cuts.push_back(p.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    PiecewiseAffine out;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const Piece& p1 = piece_at(cuts[i]);
      const Piece& p2 = o.piece_at(cuts[i]);
      out.pieces.push_back(Piece{cuts[i], cuts[i + 1], p1.a + p2.a, p1.b + p2.b});
    }
    return out;
  }

  // applies x -> alpha + beta * value
  PiecewiseAffine transform(const Rational& alpha, const Rational& beta) const {
    PiecewiseAffine out = *this;
    for (auto& p : out.pieces) {
      p.a = alpha + beta * p.a;
      p.b = beta * p.b;
    }
    return out;
  }

  Rational integral() const {
    Rational total(0);
    for (const auto& p : pieces)
      total +=
          p.a * (p.hi - p.lo) + p.b * (p.hi * p.hi - p.lo * p.lo) / Rational(2);
    return total;
  }

  Rational square_integral() const {
    Rational total(0);
    for (const auto& p : pieces) {
      // integral of (a + b t)^2 over [lo, hi)
      Rational lo = p.lo, hi = p.hi;
      Rational t2 = (hi * hi - lo * lo) / Rational(2);
      Rational t3 = (hi * hi * hi - lo * lo * lo) / Rational(3);
      total += p.a * p.a * (hi - lo) + Rational(2) * p.a * p.b * t2 + p.b * p.b * t3;
    }
    return total;
  }

  Rational min_value() const {
    Rational best = pieces.front().a + pieces.front().b * pieces.front().lo;
    for (const auto& p : pieces) {
      best = rat_min(best, p.a + p.b * p.lo);
      best = rat_min(best, p.a + p.b * p.hi);
    }
    return best;
  }
  Rational max_value() const {
    Rational best = pieces.front().a + pieces.front().b * pieces.front().lo;
    for (const auto& p : pieces) {
      best = rat_max(best, p.a + p.b * p.lo);
      best = rat_max(best, p.a + p.b * p.hi);
    }
    return best;
  }
};

// Column tile whose value depends only on the first (part-side) coordinate.
class ProfileKernel final : public Kernel {
 public:
  explicit ProfileKernel(const PiecewiseAffine& f) {
    for (const auto& p : f.pieces) {
      cuts_.push_back(p.hi.to_double());
      a_.push_back(p.a.to_double());
      b_.push_back(p.b.to_double());
    }
  }

  double value(double u, double) const override {
    size_t i = size_t(std::upper_bound(cuts_.begin(), cuts_.end() - 1, u) - cuts_.begin());
    return a_[i] + b_[i] * u;
  }

  std::string descriptor() const override { return "profile-column"; }

  bool row_integral(double u, double lo, double hi, double* out) const override {
    *out = value(u, 0.0) * (hi - lo);
    return true;
  }
  bool column_integral(double lo, double hi, double, double* out) const override {
    double total = 0.0;
    double prev = 0.0;
    for (size_t i = 0; i < cuts_.size(); ++i) {
      double a = std::max(lo, prev);
      double b = std::min(hi, cuts_[i]);
      if (b > a) total += a_[i] * (b - a) + b_[i] * 0.5 * (b * b - a * a);
      prev = cuts_[i];
    }
    *out = total;
    return true;
  }

 private:
  std::vector<double> cuts_;
  std::vector<double> a_, b_;
};

// Affine restriction of a kernel to a subinterval, rescaled to [0,1)^2.
class SubgraphonView final : public Kernel {
 public:
  SubgraphonView(KernelPtr base, double lo, double len) : base_(std::move(base)), lo_(lo), len_(len) {}
  double value(double x, double y) const override {
    return base_->value(lo_ + x * len_, lo_ + y * len_);
  }
  std::string descriptor() const override { return "subgraphon(" + base_->descriptor() + ")"; }

 private:
  KernelPtr base_;
  double lo_, len_;
};

// ---- the mock stand-in for the 10-part universal kernel ----

// Realizes the documented interface of the embedded universal graphon: parts
// at 0/14..14/14, the input kernel on the 7th part, the half kernel between
// the 7th and 8th, everything unspecified zero. The forcibility property of
// the real construction is deliberately NOT provided.
inline KernelPtr mock_ckm(KernelPtr wf) {
  std::vector<PartSpan> spans;
  const char* names[] = {"ckmA", "ckmB", "ckmC", "ckmD", "ckmE", "ckmF", "ckmG", "ckmP"};
  for (int i = 0; i < 8; ++i)
    spans.push_back({names[i], Rational(i, 14), Rational(i + 1, 14)});
  spans.push_back({"ckmQ", Rational(8, 14), Rational(13, 14)});
  spans.push_back({"ckmR", Rational(13, 14), Rational(1)});
  auto tiled = std::make_shared<TiledGraphon>(spans);
  tiled->add_tile(6, 6, 6, 6, std::move(wf));
  tiled->add_tile(6, 6, 7, 7, half_graphon());
  return tiled;
}

// ---- the assembled construction ----

struct UniversalGraphon {
  PartitionedGraphon pg;
  std::shared_ptr<TiledGraphon> w0;
  int r = 1, big_m = 8, small_m = 3, depth = 40;
  Rational epsilon, rho;
  StepPtr wf;
  KernelPtr ckm;
  std::vector<Rational> q_measures;

  // per part id (empty for G1/G2 and zero-measure parts)
  std::vector<PiecewiseAffine> h_profile;
  std::vector<PiecewiseAffine> balance_profile;
  std::vector<Rational> h_int;        // integral of h over t in [0,1)
  std::vector<Rational> balance_int;  // integral of the balancing value
  std::vector<Rational> balance_sq_int;

  std::vector<int> a_ids, bg_ids, b_other_ids, c_ids, d_ids, e_ids, f_ids;
  int g1_id = -1, g2_id = -1;

  const PartTable& table() const { return pg.table; }

  Rational delta_rational(int part_id) const {
    return Rational::from_double_exact(pg.table.part(part_id).delta);
  }
  // exact tile value of the X x G2 column
  Rational g2_column_value(int part_id) const {
    return delta_rational(part_id) * Rational(4) / epsilon;
  }
  // realized degree of a part, exact
  Rational part_degree_exact(int part_id) const {
    const auto& p = pg.table.part(part_id);
    if (part_id == g2_id) {
      Rational total(0);
      for (size_t x = 0; x < pg.table.size(); ++x)
        total += pg.table.part(int(x)).measure() * g2_column_value(int(x));
      return total;
    }
    if (part_id == g1_id) {
      Rational row(0);
      for (size_t x = 0; x < pg.table.size(); ++x) {
        int xi = int(x);
        if (xi == g1_id || xi == g2_id) continue;
        row += pg.table.part(xi).measure() * balance_int[x];
      }
      row += rho * p.measure();                                      // G1 x G1
      row += pg.table.part(g2_id).measure() * g2_column_value(g1_id);  // G1 x G2
      return row;
    }
    return p.pre_degree + delta_rational(part_id);
  }
};

namespace detail {

inline Interval level_interval(int s) {
  return Interval(Rational(1) - pow2(1 - s), Rational(1) - pow2(-s));
}

// Pieces of t -> f(level of (off + scale*t)) for levels 1..K, with a distinct
// residual value on [1-2^{-K}, 1); the window [off, off+scale) must lie in
// [0,1).
inline PiecewiseAffine level_pieces(const Rational& off, const Rational& scale, int depth,
                                    const std::function<Rational(int)>& value_of_level,
                                    const Rational& residual) {
  PiecewiseAffine out;
  Rational window_hi = off + scale;
  auto clip_push = [&](const Rational& w_lo, const Rational& w_hi, const Rational& val) {
    Rational lo = rat_max(w_lo, off);
    Rational hi = rat_min(w_hi, window_hi);
    if (!(lo < hi)) return;
    out.pieces.push_back({(lo - off) / scale, (hi - off) / scale, val, Rational(0)});
  };
  for (int s = 1; s <= depth; ++s) {
    Rational lo = Rational(1) - pow2(1 - s);
    Rational hi = Rational(1) - pow2(-s);
    if (lo >= window_hi) break;
    clip_push(lo, hi, value_of_level(s));
  }
  clip_push(Rational(1) - pow2(-depth), Rational(1), residual);
  return out;
}

// Pieces of t -> mult * deg_wf(off + scale*t).
inline PiecewiseAffine degree_pieces(const StepGraphon& wf, const Rational& off,
                                     const Rational& scale, const Rational& mult) {
  PiecewiseAffine out;
  Rational window_hi = off + scale;
  for (size_t i = 0; i < wf.parts(); ++i) {
    Rational lo = rat_max(wf.boundaries()[i], off);
    Rational hi = rat_min(wf.boundaries()[i + 1], window_hi);
    if (!(lo < hi)) continue;
    out.pieces.push_back(
        {(lo - off) / scale, (hi - off) / scale, mult * wf.part_degree(i), Rational(0)});
  }
  return out;
}

}  // namespace detail

// Tile evaluation keeps the full level structure down to what doubles can
// resolve; the exact degree profiles truncate at `profile_depth` levels and
// use the closed-form infinite sums for the level-independent columns. The
// two disagree by at most 2^-profile_depth and only on slivers of measure
// 2^-profile_depth, which every tolerance in the test suites dominates; the
// depth itself is capped by what 128-bit rational arithmetic can square.
constexpr int kTileDepth = 120;

// Builds the full partitioned graphon over the given part table: the input
// kernel on the A block, the embedded 10-part kernel on the B block, half
// kernels against the F coordinate column, checker structure on E, the
// doubly and triply refined checkers on C and D, dyadic referencing between
// A/BG and C/D, the degree-balancing column G1 and the distinguishing column
// G2.
inline UniversalGraphon build_w0(const ReorderedInput& input, const PartTable& table,
                                 KernelPtr ckm, int profile_depth = 16) {
  UniversalGraphon u;
  u.wf = input.wf;
  u.ckm = std::move(ckm);
  u.depth = profile_depth;
  u.pg.table = table;
  u.rho = rat(1, 2);

  // group layout
  for (size_t i = 0; i < table.size(); ++i) {
    const auto& p = table.part(int(i));
    if (p.group == 'A')
      u.a_ids.push_back(int(i));
    else if (p.group == 'B' && p.name.rfind("BG", 0) == 0)
      u.bg_ids.push_back(int(i));
    else if (p.group == 'B')
      u.b_other_ids.push_back(int(i));
    else if (p.group == 'C')
      u.c_ids.push_back(int(i));
    else if (p.group == 'D')
      u.d_ids.push_back(int(i));
    else if (p.group == 'E')
      u.e_ids.push_back(int(i));
    else if (p.group == 'F')
      u.f_ids.push_back(int(i));
    else if (p.name == "G1")
      u.g1_id = int(i);
    else if (p.name == "G2")
      u.g2_id = int(i);
  }
  u.big_m = int(u.a_ids.size());
  u.small_m = int(u.c_ids.size()) - 1;
  u.r = u.small_m - 2;
  u.epsilon = admissible_epsilon(u.r);
  const Rational eps = u.epsilon;
  const Rational one_minus = Rational(1) - eps;
  // the table is the authority on the bucket layout
  for (int id : u.a_ids) u.q_measures.push_back(table.part(id).measure() / one_minus);
  {
    Rational total(0);
    for (const auto& q : u.q_measures) total += q;
    if (total != Rational(1))
      throw std::invalid_argument("A-part measures do not sum to 1 - epsilon");
  }
  const Rational col20 = eps / Rational(20);
  const Rational col280 = eps / Rational(20) / Rational(14);
  // full column integral of a referencing tile: sum over all levels of
  // |I_s| * 2^{-(s-1)} = 2/3
  const Rational ref_const = Rational(2) / Rational(3);
  const int depth = profile_depth;

  // Q bucket offsets inside the sorted input
  std::vector<Rational> q_lo(u.big_m + 1, Rational(0));
  for (int k = 0; k < u.big_m; ++k) q_lo[k + 1] = q_lo[k] + u.q_measures[k];

  auto rel_in_group = [&](const std::vector<int>& ids, int id) {
    // offset and width of part id inside its group, in group-relative units
    Rational group_lo = table.part(ids.front()).lo;
    Rational group_len = table.part(ids.back()).hi - group_lo;
    const auto& p = table.part(id);
    return std::pair<Rational, Rational>{(p.lo - group_lo) / group_len,
                                         p.measure() / group_len};
  };

  // ---- exact degree profiles (h = row integral outside G1 and G2) ----
  size_t n = table.size();
  u.h_profile.resize(n);
  u.balance_profile.resize(n);
  u.h_int.assign(n, Rational(0));
  u.balance_int.assign(n, Rational(0));
  u.balance_sq_int.assign(n, Rational(0));

  auto lvl = [&](const Rational& c) {
    return [c](int s) { return c * pow2(-s); };
  };
  auto lvl_prev = [&](const Rational& c) {
    return [c](int s) { return c * pow2(-(s - 1)); };
  };

  for (size_t i = 0; i < n; ++i) {
    int id = int(i);
    const auto& p = table.part(id);
    if (id == u.g1_id || id == u.g2_id || p.measure().is_zero()) continue;
    PiecewiseAffine h = PiecewiseAffine::constant(Rational(0));
    auto add = [&](const PiecewiseAffine& piece) { h = h.plus(piece); };

    if (p.group == 'A') {
      int k = id - u.a_ids.front();
      add(detail::degree_pieces(*u.wf, q_lo[k], u.q_measures[k], one_minus));
      add(PiecewiseAffine::constant(col20 * ref_const * Rational(2)));  // C and D columns
      add(detail::level_pieces(Rational(0), Rational(1), depth, lvl(col20), col20 * pow2(-depth)));
      add(PiecewiseAffine::affine(col20 * q_lo[k], col20 * u.q_measures[k]));
    } else if (p.name.rfind("BG", 0) == 0) {
      int k = id - u.bg_ids.front();
      // embedded kernel row: (1/14)(deg_wf(v) + v) over the B block
      add(detail::degree_pieces(*u.wf, q_lo[k], u.q_measures[k], col280));
      add(PiecewiseAffine::affine(col280 * q_lo[k], col280 * u.q_measures[k]));
      add(PiecewiseAffine::constant(col20 * ref_const * Rational(2)));
      add(detail::level_pieces(Rational(0), Rational(1), depth, lvl(col20), col20 * pow2(-depth)));
      add(PiecewiseAffine::affine(col20 * q_lo[k], col20 * u.q_measures[k]));
    } else if (p.name == "BP") {
      add(PiecewiseAffine::affine(Rational(0), col280));
    } else if (p.group == 'B') {
      // BA..BF, BQ, BR: all columns vanish
    } else if (p.group == 'C' || p.group == 'D') {
      auto [off, scale] = rel_in_group(p.group == 'C' ? u.c_ids : u.d_ids, id);
      add(detail::level_pieces(off, scale, depth, lvl_prev(one_minus), Rational(0)));
      add(detail::level_pieces(off, scale, depth, lvl_prev(col280), Rational(0)));
      // within C/D: doubly refined blocks from both self and cross tiles
      auto w2 = [col20](int s) { return col20 * Rational(2) * pow2(-2 * s); };
      auto w3 = [col20](int s) { return col20 * Rational(4) * pow2(-3 * s); };
      if (p.group == 'C') {
        add(detail::level_pieces(off, scale, depth, w2, col20 * pow2(-depth)));  // C x C
        add(detail::level_pieces(off, scale, depth, w2, col20 * pow2(-depth)));  // C x D
      } else {
        add(detail::level_pieces(off, scale, depth, w2, col20 * pow2(-depth)));  // D x C
        add(detail::level_pieces(off, scale, depth, w3, col20 * pow2(-depth)));  // D x D
      }
      add(detail::level_pieces(off, scale, depth, lvl(col20), col20 * pow2(-depth)));  // E
      add(PiecewiseAffine::affine(col20 * off, col20 * scale));                        // F
    } else if (p.group == 'E') {
      auto [off, scale] = rel_in_group(u.e_ids, id);
      add(detail::level_pieces(off, scale, depth, lvl(one_minus), one_minus * pow2(-depth)));
      add(detail::level_pieces(off, scale, depth, lvl(col280), col280 * pow2(-depth)));
      add(detail::level_pieces(off, scale, depth, lvl(col20), col20 * pow2(-depth)));  // C
      add(detail::level_pieces(off, scale, depth, lvl(col20), col20 * pow2(-depth)));  // D
      add(detail::level_pieces(off, scale, depth, lvl(col20), col20 * pow2(-depth)));  // E
      add(PiecewiseAffine::affine(col20 * off, col20 * scale));
    } else if (p.group == 'F') {
      auto [off, scale] = rel_in_group(u.f_ids, id);
      Rational groups_total = one_minus + col280 + col20 * Rational(4);
      add(PiecewiseAffine::affine(groups_total * off, groups_total * scale));
    }

    u.h_profile[i] = h;
    u.h_int[i] = h.integral();
    PiecewiseAffine w = h.transform(Rational(2) / eps * p.pre_degree, -(Rational(2) / eps));
    if (w.min_value() < Rational(0) || w.max_value() > Rational(1))
      throw BalanceRangeError("balancing value outside [0,1] on part " + p.name +
                              " (pre-degree " + p.pre_degree.str() + ")");
    u.balance_profile[i] = w;
    u.balance_int[i] = w.integral();
    u.balance_sq_int[i] = w.square_integral();
  }

  // ---- tile assembly ----
  std::vector<PartSpan> spans;
  for (size_t i = 0; i < n; ++i)
    spans.push_back({table.part(int(i)).name, table.part(int(i)).lo, table.part(int(i)).hi});
  auto w0 = std::make_shared<TiledGraphon>(spans);

  auto nonempty = [&](int id) { return !table.part(id).measure().is_zero(); };
  size_t a_first = u.a_ids.front(), a_last = u.a_ids.back();
  size_t b_first = size_t(u.a_ids.back()) + 1;
  size_t b_last = b_first + 8 + u.bg_ids.size();
  size_t c_first = u.c_ids.front(), c_last = u.c_ids.back();
  size_t d_first = u.d_ids.front(), d_last = u.d_ids.back();
  size_t e_first = u.e_ids.front(), e_last = u.e_ids.back();
  size_t f_first = u.f_ids.front(), f_last = u.f_ids.back();

  w0->add_tile(a_first, a_last, a_first, a_last, u.wf);
  w0->add_tile(b_first, b_last, b_first, b_last, u.ckm);
  auto ref_c = std::make_shared<DyadicRefKernel>(DyadicRefKernel::Variant::direct, kTileDepth);
  auto ref_d = std::make_shared<DyadicRefKernel>(DyadicRefKernel::Variant::modular, kTileDepth);
  auto checker1 = checker_graphon(1, kTileDepth);
  for (int id : u.a_ids)
    if (nonempty(id)) {
      w0->add_tile(size_t(id), size_t(id), c_first, c_last, ref_c);
      w0->add_tile(size_t(id), size_t(id), d_first, d_last, ref_d);
      w0->add_tile(e_first, e_last, size_t(id), size_t(id), checker1);
    }
  for (int id : u.bg_ids)
    if (nonempty(id)) {
      w0->add_tile(size_t(id), size_t(id), c_first, c_last, ref_c);
      w0->add_tile(size_t(id), size_t(id), d_first, d_last, ref_d);
      w0->add_tile(e_first, e_last, size_t(id), size_t(id), checker1);
    }
  w0->add_tile(c_first, c_last, c_first, c_last, checker_graphon(2, kTileDepth));
  w0->add_tile(c_first, c_last, d_first, d_last, checker_graphon(2, kTileDepth));
  w0->add_tile(d_first, d_last, d_first, d_last, checker_graphon(3, kTileDepth));
  w0->add_tile(e_first, e_last, c_first, c_last, checker1);
  w0->add_tile(e_first, e_last, d_first, d_last, checker1);
  w0->add_tile(e_first, e_last, e_first, e_last, checker1);
  auto half = half_graphon();
  w0->add_tile(a_first, a_last, f_first, f_last, half);
  w0->add_tile(u.bg_ids.front(), u.bg_ids.back(), f_first, f_last, half);
  w0->add_tile(c_first, c_last, f_first, f_last, half);
  w0->add_tile(d_first, d_last, f_first, f_last, half);
  w0->add_tile(e_first, e_last, f_first, f_last, half);
  w0->add_tile(f_first, f_last, f_first, f_last, half);
  for (size_t i = 0; i < n; ++i) {
    int id = int(i);
    if (id == u.g1_id || id == u.g2_id || !nonempty(id)) continue;
    w0->add_tile(i, i, size_t(u.g1_id), size_t(u.g1_id),
                 std::make_shared<ProfileKernel>(u.balance_profile[i]));
  }
  w0->add_tile(size_t(u.g1_id), size_t(u.g1_id), size_t(u.g1_id), size_t(u.g1_id),
               constant_graphon(u.rho));
  for (size_t i = 0; i < n; ++i) {
    int id = int(i);
    if (id == u.g2_id || !nonempty(id)) continue;
    w0->add_tile(i, i, size_t(u.g2_id), size_t(u.g2_id),
                 constant_graphon(u.g2_column_value(id)));
  }
  w0->add_tile(size_t(u.g2_id), size_t(u.g2_id), size_t(u.g2_id), size_t(u.g2_id),
               constant_graphon(u.g2_column_value(u.g2_id)));

  u.w0 = w0;
  u.pg.kernel = w0;
  return u;
}

}  // namespace graphonlab
