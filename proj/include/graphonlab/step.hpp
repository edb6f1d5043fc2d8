#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphonlab/kernel.hpp"
#include "graphonlab/rational.hpp"

namespace graphonlab {

struct MeasureSumError : std::invalid_argument {
  explicit MeasureSumError(const std::string& what) : std::invalid_argument(what) {}
};
struct AsymmetryError : std::invalid_argument {
  explicit AsymmetryError(const std::string& what) : std::invalid_argument(what) {}
};
struct RangeError : std::invalid_argument {
  explicit RangeError(const std::string& what) : std::invalid_argument(what) {}
};

// Step graphon: exact rational part measures and a symmetric rational block
// value matrix. The exactly computable workhorse of the library.
class StepGraphon final : public Kernel {
 public:
  StepGraphon(std::vector<Rational> measures, std::vector<std::vector<Rational>> values)
      : measures_(std::move(measures)), values_(std::move(values)) {
    size_t k = measures_.size();
    if (k == 0) throw MeasureSumError("a step graphon needs at least one part");
    Rational sum(0);
    for (const auto& m : measures_) {
      if (m.sign() <= 0) throw MeasureSumError("part measures must be positive");
      sum += m;
    }
    if (sum != Rational(1))
      throw MeasureSumError("part measures sum to " + sum.str() + ", expected 1");
    if (values_.size() != k) throw AsymmetryError("value matrix size mismatch");
    for (size_t i = 0; i < k; ++i) {
      if (values_[i].size() != k) throw AsymmetryError("value matrix is not square");
      for (size_t j = 0; j < k; ++j) {
        if (values_[i][j] != values_[j][i])
          throw AsymmetryError("value matrix is not symmetric at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
        if (values_[i][j] < Rational(0) || values_[i][j] > Rational(1))
          throw RangeError("block value outside [0,1]");
      }
    }
    boundaries_.resize(k + 1);
    boundaries_[0] = Rational(0);
    for (size_t i = 0; i < k; ++i) boundaries_[i + 1] = boundaries_[i] + measures_[i];
    boundaries_d_.reserve(k + 1);
    for (const auto& b : boundaries_) boundaries_d_.push_back(b.to_double());
    values_d_.resize(k, std::vector<double>(k));
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j) values_d_[i][j] = values_[i][j].to_double();
  }

  size_t parts() const { return measures_.size(); }
  const std::vector<Rational>& measures() const { return measures_; }
  const Rational& measure(size_t i) const { return measures_[i]; }
  const Rational& block(size_t i, size_t j) const { return values_[i][j]; }
  double block_d(size_t i, size_t j) const { return values_d_[i][j]; }
  const std::vector<Rational>& boundaries() const { return boundaries_; }
  Interval part_interval(size_t i) const { return Interval(boundaries_[i], boundaries_[i + 1]); }

  // Part containing x under the [lo,hi) convention.
  size_t part_index(double x) const {
    auto it = std::upper_bound(boundaries_d_.begin() + 1, boundaries_d_.end() - 1, x);
    return size_t(it - (boundaries_d_.begin() + 1));
  }
  size_t part_index(const Rational& x) const {
    size_t lo = 0, hi = parts() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (boundaries_[mid] <= x)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  double value(double x, double y) const override { return values_d_[part_index(x)][part_index(y)]; }

  std::string descriptor() const override {
    return "step(" + std::to_string(parts()) + " parts)";
  }

  bool row_integral(double x, double lo, double hi, double* out) const override {
    size_t i = part_index(x);
    double total = 0.0;
    for (size_t j = 0; j < parts(); ++j) {
      double a = std::max(lo, boundaries_d_[j]);
      double b = std::min(hi, boundaries_d_[j + 1]);
      if (b > a) total += (b - a) * values_d_[i][j];
    }
    *out = total;
    return true;
  }

  bool rect_integral(const Interval& x, const Interval& y, Rational* out) const override {
    *out = pair_density_exact({x}, {y});
    return true;
  }

  // Exact degree of part i.
  Rational part_degree(size_t i) const {
    Rational d(0);
    for (size_t j = 0; j < parts(); ++j) d += measures_[j] * values_[i][j];
    return d;
  }

  Rational max_degree() const {
    Rational best(0);
    for (size_t i = 0; i < parts(); ++i) best = rat_max(best, part_degree(i));
    return best;
  }

  // Exact integral of W over A x B for rational-endpoint interval unions.
  Rational pair_density_exact(const std::vector<Interval>& a,
                              const std::vector<Interval>& b) const {
    Rational total(0);
    for (const auto& ia : a)
      for (const auto& ib : b) total += rect_integral(ia, ib);
    return total;
  }

  // Exact integral of W^2 over the square.
  Rational square_integral() const {
    Rational total(0);
    for (size_t i = 0; i < parts(); ++i)
      for (size_t j = 0; j < parts(); ++j)
        total += measures_[i] * measures_[j] * values_[i][j] * values_[i][j];
    return total;
  }

 private:
  Rational rect_integral(const Interval& a, const Interval& b) const {
    Rational total(0);
    for (size_t i = 0; i < parts(); ++i) {
      Rational ai = rat_max(a.lo, boundaries_[i]);
      Rational bi = rat_min(a.hi, boundaries_[i + 1]);
      if (!(ai < bi)) continue;
      for (size_t j = 0; j < parts(); ++j) {
        Rational aj = rat_max(b.lo, boundaries_[j]);
        Rational bj = rat_min(b.hi, boundaries_[j + 1]);
        if (!(aj < bj)) continue;
        total += (bi - ai) * (bj - aj) * values_[i][j];
      }
    }
    return total;
  }

  std::vector<Rational> measures_;
  std::vector<std::vector<Rational>> values_;
  std::vector<Rational> boundaries_;
  std::vector<double> boundaries_d_;
  std::vector<std::vector<double>> values_d_;
};

using StepPtr = std::shared_ptr<const StepGraphon>;

inline StepPtr step_graphon(std::vector<Rational> measures,
                            std::vector<std::vector<Rational>> values) {
  return std::make_shared<StepGraphon>(std::move(measures), std::move(values));
}

}  // namespace graphonlab
