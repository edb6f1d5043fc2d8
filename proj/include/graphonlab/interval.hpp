#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphonlab/rational.hpp"

namespace graphonlab {

struct IndexError : std::out_of_range {
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

struct NonContiguousError : std::invalid_argument {
  explicit NonContiguousError(const std::string& what) : std::invalid_argument(what) {}
};

// Half-open [lo, hi) with exact rational endpoints, 0 <= lo < hi <= 1.
struct Interval {
  Rational lo;
  Rational hi;

  Interval() : lo(0), hi(1) {}
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (!(Rational(0) <= lo && lo < this->hi && this->hi <= Rational(1)))
      throw std::invalid_argument("interval must satisfy 0 <= lo < hi <= 1, got [" + lo.str() +
                                  "," + this->hi.str() + ")");
  }

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }
  bool contains(double x) const { return lo.to_double() <= x && x < hi.to_double(); }

  std::string str() const { return "[" + lo.str() + "," + hi.str() + ")"; }
};

// Dyadic interval of order s at position t: [(t-1)/2^(s-1), t/2^(s-1)).
struct DyadicIndex {
  int s = 1;
  long long t = 1;
};

inline Interval dyadic_interval(const DyadicIndex& idx) {
  if (idx.s < 1) throw IndexError("dyadic order must be >= 1");
  long long count = 1LL << (idx.s - 1);
  if (idx.t < 1 || idx.t > count)
    throw IndexError("dyadic position " + std::to_string(idx.t) + " out of range [1," +
                     std::to_string(count) + "]");
  Rational w = pow2(-(idx.s - 1));
  return Interval(Rational(idx.t - 1) * w, Rational(idx.t) * w);
}

// Linear bijection [0,1) -> [lo,hi): x |-> x*(hi-lo) + lo.
struct AffineMap {
  Rational offset;
  Rational scale;

  double fwd(double x) const { return x * scale.to_double() + offset.to_double(); }
  double inv(double y) const { return (y - offset.to_double()) / scale.to_double(); }
  Rational fwd(const Rational& x) const { return x * scale + offset; }
  Rational inv(const Rational& y) const { return (y - offset) / scale; }
};

// gamma map of a contiguous interval group: [0,1) -> union of the group.
inline AffineMap gamma_map(const std::vector<Interval>& group) {
  if (group.empty()) throw NonContiguousError("empty interval group");
  std::vector<Interval> sorted = group;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].hi != sorted[i + 1].lo)
      throw NonContiguousError("interval group union is not contiguous at " + sorted[i].hi.str());
  }
  return AffineMap{sorted.front().lo, sorted.back().hi - sorted.front().lo};
}

}  // namespace graphonlab
