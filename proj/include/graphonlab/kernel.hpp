#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "graphonlab/interval.hpp"
#include "graphonlab/rational.hpp"

namespace graphonlab {

// Symmetric measurable kernel on [0,1)^2 with values in [0,1]. Immutable after
// construction; evaluation is pure and safe to call concurrently.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual double value(double x, double y) const = 0;
  virtual std::string descriptor() const = 0;

  // Exact integral of the row x over [lo,hi) when a closed form exists.
  virtual bool row_integral(double x, double lo, double hi, double* out) const {
    (void)x, (void)lo, (void)hi, (void)out;
    return false;
  }

  // Integral over the first argument; defaults to the row integral, which is
  // correct for symmetric kernels. Asymmetric tile patches must override.
  virtual bool column_integral(double lo, double hi, double y, double* out) const {
    return row_integral(y, lo, hi, out);
  }

  // Exact integral over an axis-parallel rectangle, when a closed form
  // exists; used by the grid approximation.
  virtual bool rect_integral(const Interval& x, const Interval& y, Rational* out) const {
    (void)x, (void)y, (void)out;
    return false;
  }
};

using KernelPtr = std::shared_ptr<const Kernel>;

class ConstantKernel final : public Kernel {
 public:
  explicit ConstantKernel(Rational c) : c_(std::move(c)), cd_(c_.to_double()) {
    if (c_ < Rational(0) || c_ > Rational(1))
      throw std::invalid_argument("constant kernel value outside [0,1]");
  }

  double value(double, double) const override { return cd_; }
  std::string descriptor() const override { return "constant(" + c_.str() + ")"; }
  bool row_integral(double, double lo, double hi, double* out) const override {
    *out = cd_ * (hi - lo);
    return true;
  }
  const Rational& constant() const { return c_; }

 private:
  Rational c_;
  double cd_;
};

// Indicator of x + y >= 1.
class HalfKernel final : public Kernel {
 public:
  double value(double x, double y) const override { return x + y >= 1.0 ? 1.0 : 0.0; }
  std::string descriptor() const override { return "half"; }
  bool row_integral(double x, double lo, double hi, double* out) const override {
    double cut = 1.0 - x;  // value 1 for y >= cut
    *out = std::max(0.0, hi - std::max(lo, cut));
    return true;
  }
  bool rect_integral(const Interval& x, const Interval& y, Rational* out) const override {
    // area of {u + v >= 1} in the rectangle: zero left of u = 1 - y.hi, a
    // triangle up to u = 1 - y.lo, full height beyond
    Rational xa = rat_max(x.lo, rat_min(x.hi, Rational(1) - y.hi));
    Rational xb = rat_max(x.lo, rat_min(x.hi, Rational(1) - y.lo));
    Rational total(0);
    if (xa < xb) {
      // integral of (u + y.hi - 1) du over [xa, xb)
      total += (xb * xb - xa * xa) / Rational(2) + (y.hi - Rational(1)) * (xb - xa);
    }
    if (xb < x.hi) total += (y.hi - y.lo) * (x.hi - xb);
    *out = total;
    return true;
  }
};

namespace detail {

// Level k such that u lies in I_k = [1 - 2^{1-k}, 1 - 2^{-k}); levels beyond
// max_depth collapse into one residual block reported as max_depth + 1.
inline int checker_level(double u, int max_depth) {
  if (u <= 0.0) return 1;
  double tail = 1.0 - u;
  if (tail <= std::ldexp(1.0, -max_depth)) return max_depth + 1;
  int e = 0;
  double f = std::frexp(tail, &e);  // tail = f * 2^e, f in [0.5, 1)
  int k = (f == 0.5) ? (2 - e) : (1 - e);
  return k < 1 ? 1 : (k > max_depth ? max_depth + 1 : k);
}

}  // namespace detail

// Block-diagonal 1-kernel on geometrically shrinking intervals I_k. The
// refinement order r >= 2 subdivides I_k into 2^{(k-1)(r-1)} equal blocks.
// Structure is truncated at `depth` levels; the residual interval
// [1-2^{-depth}, 1) is a single block.
class CheckerKernel final : public Kernel {
 public:
  explicit CheckerKernel(int r, int depth = kDefaultDepth) : r_(r), depth_(depth) {
    if (r < 1) throw std::invalid_argument("checker refinement must be >= 1");
    if (depth < 1) throw std::invalid_argument("checker depth must be >= 1");
  }

  static constexpr int kDefaultDepth = 40;

  double value(double x, double y) const override {
    int kx = detail::checker_level(x, depth_);
    if (kx != detail::checker_level(y, depth_)) return 0.0;
    if (r_ == 1 || kx > depth_) return 1.0;
    double len = std::ldexp(1.0, -kx);
    double lo = 1.0 - 2.0 * len;
    double cells = std::ldexp(1.0, (kx - 1) * (r_ - 1));
    double fx = std::floor((x - lo) / len * cells);
    double fy = std::floor((y - lo) / len * cells);
    return fx == fy ? 1.0 : 0.0;
  }

  std::string descriptor() const override { return "checker(" + std::to_string(r_) + ")"; }

  bool row_integral(double x, double lo, double hi, double* out) const override {
    // Row of a point at level k is one block of the same level.
    int k = detail::checker_level(x, depth_);
    double blo, bhi;
    if (k > depth_) {
      blo = 1.0 - std::ldexp(1.0, -depth_);
      bhi = 1.0;
    } else {
      double len = std::ldexp(1.0, -k);
      blo = 1.0 - 2.0 * len;
      bhi = 1.0 - len;
      if (r_ > 1) {
        double cells = std::ldexp(1.0, (k - 1) * (r_ - 1));
        double cell = std::floor((x - blo) / len * cells);
        bhi = blo + len * (cell + 1.0) / cells;
        blo = blo + len * cell / cells;
      }
    }
    *out = std::max(0.0, std::min(hi, bhi) - std::max(lo, blo));
    return true;
  }

  bool rect_integral(const Interval& x, const Interval& y, Rational* out) const override {
    if (r_ != 1 || depth_ > 60) return false;
    Rational total(0);
    for (const auto& block : blocks()) {
      Rational wx = rat_min(x.hi, block.hi) - rat_max(x.lo, block.lo);
      if (wx.sign() <= 0) continue;
      Rational wy = rat_min(y.hi, block.hi) - rat_max(y.lo, block.lo);
      if (wy.sign() <= 0) continue;
      total += wx * wy;
    }
    *out = total;
    return true;
  }

  int refinement() const { return r_; }
  int depth() const { return depth_; }

  // The diagonal blocks as exact intervals: I_1,...,I_depth plus the residual.
  std::vector<Interval> blocks() const {
    std::vector<Interval> out;
    Rational lo(0);
    for (int k = 1; k <= depth_; ++k) {
      Rational hi = Rational(1) - pow2(-k);
      out.emplace_back(lo, hi);
      lo = hi;
    }
    out.emplace_back(lo, Rational(1));
    return out;
  }

 private:
  int r_;
  int depth_;
};

inline KernelPtr constant_graphon(Rational c) { return std::make_shared<ConstantKernel>(std::move(c)); }
inline KernelPtr half_graphon() { return std::make_shared<HalfKernel>(); }
inline KernelPtr checker_graphon(int r, int depth = CheckerKernel::kDefaultDepth) {
  return std::make_shared<CheckerKernel>(r, depth);
}

}  // namespace graphonlab
