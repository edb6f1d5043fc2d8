#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphonlab/density.hpp"
#include "graphonlab/interval.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/step.hpp"

namespace graphonlab {

struct NotMeasurePreserving : std::invalid_argument {
  explicit NotMeasurePreserving(const std::string& what) : std::invalid_argument(what) {}
};
struct PrecheckError : std::logic_error {
  explicit PrecheckError(const std::string& what) : std::logic_error(what) {}
};

struct Spectrum {
  std::vector<double> eigenvalues;  // non-increasing |lambda|

  double moment(int p) const {
    KahanSum s;
    for (double lam : eigenvalues) s.add(std::pow(lam, p));
    return s.value();
  }
};

// Nonzero spectrum of the kernel operator of a step graphon: eigenvalues of
// D^{1/2} V D^{1/2} with D = diag(part measures), V = block values.
inline Spectrum step_spectrum(const StepGraphon& w) {
  int k = int(w.parts());
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      a(i, j) = std::sqrt(w.measure(i).to_double()) * w.block_d(i, j) *
                std::sqrt(w.measure(j).to_double());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Spectrum s;
  for (int i = 0; i < k; ++i) s.eigenvalues.push_back(solver.eigenvalues()(i));
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(),
            [](double a_, double b_) { return std::abs(a_) > std::abs(b_); });
  return s;
}

constexpr size_t kOmegaMaxParts = 64;

// omega(W): maximum total measure of a part subset on which every block value
// (including diagonals) is exactly 1. Exact branch-and-bound.
inline Rational omega(const StepGraphon& w) {
  size_t k = w.parts();
  if (k > kOmegaMaxParts) throw SizeError("omega supports at most 64 parts");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < k; ++i)
    if (w.block(i, i) == Rational(1)) eligible.push_back(i);
  std::sort(eligible.begin(), eligible.end(),
            [&](size_t a, size_t b) { return w.measure(a) > w.measure(b); });
  size_t m = eligible.size();
  std::vector<uint64_t> compat(m, 0);
  for (size_t a = 0; a < m; ++a)
    for (size_t b = 0; b < m; ++b)
      if (w.block(eligible[a], eligible[b]) == Rational(1)) compat[a] |= (1ULL << b);
  // suffix_weight[i] = total measure of eligible parts i..m-1
  std::vector<Rational> suffix(m + 1, Rational(0));
  for (size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] + w.measure(eligible[i]);

  Rational best(0);
  auto rec = [&](auto&& self, size_t idx, uint64_t allowed, Rational current) -> void {
    if (!(current + suffix[idx] > best)) return;
    if (idx == m) {
      best = rat_max(best, current);
      return;
    }
    if ((allowed >> idx) & 1ULL)
      self(self, idx + 1, allowed & compat[idx], current + w.measure(eligible[idx]));
    self(self, idx + 1, allowed, current);
  };
  rec(rec, 0, m >= 64 ? ~0ULL : ((1ULL << m) - 1), Rational(0));
  return best;
}

// Piecewise-affine measure-preserving map of [0,1): increasing affine pieces
// source -> target. Text format "lo,hi->lo',hi';...".
class IntervalMap {
 public:
  struct Piece {
    Interval src;
    Interval dst;

    Rational slope() const { return dst.length() / src.length(); }
    Rational apply(const Rational& x) const { return dst.lo + (x - src.lo) * slope(); }
    double apply(double x) const {
      return dst.lo.to_double() +
             (x - src.lo.to_double()) * (dst.length().to_double() / src.length().to_double());
    }
  };

  explicit IntervalMap(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.src.lo < b.src.lo; });
    Rational cursor(0);
    for (const auto& p : pieces_) {
      if (p.src.lo != cursor)
        throw NotMeasurePreserving("source intervals do not partition [0,1)");
      if (p.slope() < Rational(1))
        throw NotMeasurePreserving("piece slope below 1 at " + p.src.str());
      cursor = p.src.hi;
    }
    if (cursor != Rational(1))
      throw NotMeasurePreserving("source intervals do not cover [0,1)");
    verify_measure_preserving();
  }

  static IntervalMap identity() {
    return IntervalMap({Piece{Interval(Rational(0), Rational(1)), Interval(Rational(0), Rational(1))}});
  }

  const std::vector<Piece>& pieces() const { return pieces_; }

  double apply(double x) const {
    for (const auto& p : pieces_)
      if (p.src.contains(x)) return p.apply(x);
    return pieces_.back().apply(x);
  }

  // Preimage of a target interval as a union of source intervals.
  std::vector<Interval> preimage(const Interval& j) const {
    std::vector<Interval> out;
    for (const auto& p : pieces_) {
      Rational lo = rat_max(j.lo, p.dst.lo);
      Rational hi = rat_min(j.hi, p.dst.hi);
      if (!(lo < hi)) continue;
      Rational inv_slope = p.src.length() / p.dst.length();
      out.emplace_back(p.src.lo + (lo - p.dst.lo) * inv_slope,
                       p.src.lo + (hi - p.dst.lo) * inv_slope);
    }
    return out;
  }

  static IntervalMap parse(const std::string& text);
  std::string str() const;

 private:
  void verify_measure_preserving() const {
    // Over every elementary target cell the preimage densities must sum to 1.
    std::vector<Rational> cuts{Rational(0), Rational(1)};
    for (const auto& p : pieces_) {
      cuts.push_back(p.dst.lo);
      cuts.push_back(p.dst.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
      Rational density(0);
      for (const auto& p : pieces_)
        if (p.dst.lo <= cuts[c] && cuts[c + 1] <= p.dst.hi)
          density += p.src.length() / p.dst.length();
      if (density != Rational(1))
        throw NotMeasurePreserving("preimage density over [" + cuts[c].str() + "," +
                                   cuts[c + 1].str() + ") is " + density.str());
    }
  }

  std::vector<Piece> pieces_;
};

inline IntervalMap IntervalMap::parse(const std::string& text) {
  std::vector<Piece> pieces;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    std::string part = text.substr(pos, end - pos);
    auto arrow = part.find("->");
    if (arrow == std::string::npos)
      throw std::invalid_argument("interval map piece missing '->': " + part);
    auto split_pair = [](const std::string& s) {
      auto comma = s.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("interval needs 'lo,hi': " + s);
      return Interval(Rational::from_string(s.substr(0, comma)),
                      Rational::from_string(s.substr(comma + 1)));
    };
    pieces.push_back(Piece{split_pair(part.substr(0, arrow)), split_pair(part.substr(arrow + 2))});
    pos = end + 1;
  }
  return IntervalMap(std::move(pieces));
}

inline std::string IntervalMap::str() const {
  std::string out;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (i) out += ";";
    out += pieces_[i].src.lo.str() + "," + pieces_[i].src.hi.str() + "->" +
           pieces_[i].dst.lo.str() + "," + pieces_[i].dst.hi.str();
  }
  return out;
}

struct PushforwardReport {
  double max_discrepancy = 0.0;
  int depth = 0;
  long long pairs_checked = 0;
  bool exact = false;
  bool passed(double tol = 1e-9) const { return max_discrepancy <= tol; }
};

// Verifies d_{W1}(phi^{-1}(J), phi^{-1}(J')) = d_{W2}(J, J') over all dyadic
// J, J' up to the given order.
inline PushforwardReport pushforward_check(const Kernel& w1, const Kernel& w2,
                                           const IntervalMap& phi, int depth,
                                           const McConfig& cfg = {}) {
  PushforwardReport rep;
  rep.depth = depth;
  const auto* s1 = dynamic_cast<const StepGraphon*>(&w1);
  const auto* s2 = dynamic_cast<const StepGraphon*>(&w2);
  rep.exact = s1 != nullptr && s2 != nullptr;
  for (int s = 1; s <= depth; ++s) {
    long long count = 1LL << (s - 1);
    for (long long t = 1; t <= count; ++t) {
      Interval j = dyadic_interval({s, t});
      auto pre_j = phi.preimage(j);
      for (long long t2 = t; t2 <= count; ++t2) {
        Interval j2 = dyadic_interval({s, t2});
        auto pre_j2 = phi.preimage(j2);
        double lhs, rhs;
        if (rep.exact) {
          lhs = s1->pair_density_exact(pre_j, pre_j2).to_double();
          rhs = s2->pair_density_exact({j}, {j2}).to_double();
        } else {
          McConfig local = cfg;
          local.seed = cfg.seed + uint64_t(s * 1000003 + t * 1009 + t2);
          lhs = pair_density(w1, pre_j, pre_j2, local).estimate;
          rhs = pair_density(w2, {j}, {j2}, local).estimate;
        }
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(lhs - rhs));
        ++rep.pairs_checked;
      }
    }
  }
  return rep;
}

struct RigidityVerdict {
  std::string verdict;  // "pullback-equal" | "not weakly isomorphic via this map"
  double t_c4_w1 = 0.0;
  double t_c4_w2 = 0.0;
  double max_discrepancy = 0.0;  // from the pushforward precheck
  long long sampled_points = 0;
  long long pullback_violations = 0;
};

// Decides the rigidity dichotomy: with the pushforward condition verified,
// equal t(C4) values mean W1 must equal the phi-pullback of W2; unequal values
// certify the pair cannot be identified through phi.
inline RigidityVerdict rigidity_verdict(const StepGraphon& w1, const StepGraphon& w2,
                                        const IntervalMap& phi,
                                        const PushforwardReport& precheck,
                                        uint64_t seed = 1, long long sample_points = 10'000,
                                        double tol = 1e-9) {
  if (precheck.pairs_checked == 0)
    throw PrecheckError("pushforward_check must run before rigidity_verdict");
  if (!precheck.passed(1e-6))
    throw PrecheckError("pushforward_check did not pass; rigidity dichotomy does not apply");
  RigidityVerdict v;
  v.max_discrepancy = precheck.max_discrepancy;
  Rational t1 = t_c4_rational(w1);
  Rational t2 = t_c4_rational(w2);
  v.t_c4_w1 = t1.to_double();
  v.t_c4_w2 = t2.to_double();
  if (t1 != t2) {
    v.verdict = "not weakly isomorphic via this map";
    return v;
  }
  v.verdict = "pullback-equal";
  Rng rng = Rng::stream(seed, 0);
  v.sampled_points = sample_points;
  for (long long i = 0; i < sample_points; ++i) {
    double x = rng.uniform();
    double y = rng.uniform();
    double lhs = w1.value(x, y);
    double rhs = w2.value(phi.apply(x), phi.apply(y));
    if (std::abs(lhs - rhs) > tol) ++v.pullback_violations;
  }
  return v;
}

}  // namespace graphonlab
