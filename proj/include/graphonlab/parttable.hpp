#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphonlab/interval.hpp"
#include "graphonlab/kernel.hpp"
#include "graphonlab/rational.hpp"
#include "graphonlab/step.hpp"

namespace graphonlab {

// Named, ordered parts of a partitioned graphon. Parts are half-open
// subintervals laid out consecutively over [0,1); zero-measure parts are
// legal (they arise from empty degree buckets of the input).
class PartTable {
 public:
  struct Part {
    std::string name;
    char group = 0;            // one-letter group tag, 0 if ungrouped
    Rational lo{0};
    Rational hi{0};
    Rational pre_degree{0};
    bool has_pre_degree = false;
    double delta = 0.0;

    Rational measure() const { return hi - lo; }
  };

  int add(Part part) {
    Rational expected = parts_.empty() ? Rational(0) : parts_.back().hi;
    if (part.lo != expected)
      throw std::invalid_argument("part " + part.name + " does not start at " + expected.str());
    if (part.hi < part.lo) throw std::invalid_argument("part with negative measure");
    if (index_.count(part.name)) throw std::invalid_argument("duplicate part " + part.name);
    int id = int(parts_.size());
    index_[part.name] = id;
    parts_.push_back(std::move(part));
    return id;
  }

  void finalize() const {
    if (parts_.empty() || parts_.back().hi != Rational(1))
      throw std::invalid_argument("parts do not cover [0,1)");
  }

  size_t size() const { return parts_.size(); }
  const Part& part(int id) const { return parts_.at(id); }
  const std::vector<Part>& parts() const { return parts_; }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown part '" + name + "'");
    return it->second;
  }
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  std::vector<int> group_ids(char group) const {
    std::vector<int> out;
    for (size_t i = 0; i < parts_.size(); ++i)
      if (parts_[i].group == group) out.push_back(int(i));
    return out;
  }

  Rational measure_of(const std::vector<int>& ids) const {
    Rational total(0);
    for (int id : ids) total += parts_.at(id).measure();
    return total;
  }

  // Non-empty intervals of the given parts.
  std::vector<Interval> intervals_of(const std::vector<int>& ids) const {
    std::vector<Interval> out;
    for (int id : ids) {
      const Part& p = parts_.at(id);
      if (p.lo < p.hi) out.emplace_back(p.lo, p.hi);
    }
    return out;
  }

  Rational total_measure() const {
    return parts_.empty() ? Rational(0) : parts_.back().hi;
  }

 private:
  std::vector<Part> parts_;
  std::map<std::string, int> index_;
};

// A kernel together with the table binding part names to intervals.
struct PartitionedGraphon {
  KernelPtr kernel;
  PartTable table;
};

// Table for a plain step graphon with parts named P1..Pk.
inline PartTable table_for_step(const StepGraphon& w) {
  PartTable t;
  for (size_t i = 0; i < w.parts(); ++i) {
    PartTable::Part p;
    p.name = "P" + std::to_string(i + 1);
    p.lo = w.boundaries()[i];
    p.hi = w.boundaries()[i + 1];
    t.add(std::move(p));
  }
  t.finalize();
  return t;
}

inline PartitionedGraphon partitioned_step(StepPtr w) {
  return PartitionedGraphon{w, table_for_step(*w)};
}

}  // namespace graphonlab
