#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphonlab/kernel.hpp"
#include "graphonlab/rational.hpp"

namespace graphonlab {

struct OverlapError : std::invalid_argument {
  explicit OverlapError(const std::string& what) : std::invalid_argument(what) {}
};
struct CoverageError : std::invalid_argument {
  explicit CoverageError(const std::string& what) : std::invalid_argument(what) {}
};

// Named half-open span of the base partition. Zero-length spans are allowed
// (they arise from empty input parts) and are simply unreachable in dispatch.
struct PartSpan {
  std::string name;
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
};

// Graphon assembled from rectangular tiles over a base partition of [0,1).
// A tile covers a contiguous run of partition cells on each axis and evaluates
// a sub-kernel in tile-relative coordinates. Adding tile (X,Y) also defines
// (Y,X) by transposition, so symmetry holds structurally. Untiled area is 0.
//
// Off-diagonal sub-kernels need not be symmetric; diagonal ones must be.
class TiledGraphon final : public Kernel {
 public:
  explicit TiledGraphon(std::vector<PartSpan> partition) : partition_(std::move(partition)) {
    if (partition_.empty()) throw CoverageError("empty partition");
    if (partition_.front().lo != Rational(0))
      throw CoverageError("partition must start at 0");
    for (size_t i = 0; i < partition_.size(); ++i) {
      if (partition_[i].hi < partition_[i].lo) throw OverlapError("negative-length span");
      if (i + 1 < partition_.size() && partition_[i].hi != partition_[i + 1].lo)
        throw CoverageError("partition gap or overlap after " + partition_[i].name);
    }
    if (partition_.back().hi != Rational(1)) throw CoverageError("partition must end at 1");
    size_t k = partition_.size();
    boundaries_d_.reserve(k + 1);
    boundaries_d_.push_back(0.0);
    for (const auto& s : partition_) boundaries_d_.push_back(s.hi.to_double());
    cell_patch_.assign(k * k, -1);
    cell_flip_.assign(k * k, 0);
  }

  size_t cells() const { return partition_.size(); }
  const std::vector<PartSpan>& partition() const { return partition_; }

  size_t cell_index(double x) const {
    auto it = std::upper_bound(boundaries_d_.begin() + 1, boundaries_d_.end() - 1, x);
    return size_t(it - (boundaries_d_.begin() + 1));
  }

  // Tile over cells [x_first..x_last] x [y_first..y_last] (inclusive runs).
  void add_tile(size_t x_first, size_t x_last, size_t y_first, size_t y_last, KernelPtr kernel) {
    if (x_last >= cells() || y_last >= cells() || x_first > x_last || y_first > y_last)
      throw std::invalid_argument("tile cell range out of bounds");
    Patch patch;
    patch.kernel = std::move(kernel);
    patch.x_lo = partition_[x_first].lo.to_double();
    patch.x_len = (partition_[x_last].hi - partition_[x_first].lo).to_double();
    patch.y_lo = partition_[y_first].lo.to_double();
    patch.y_len = (partition_[y_last].hi - partition_[y_first].lo).to_double();
    patch.x_first = x_first;
    patch.x_last = x_last;
    patch.y_first = y_first;
    patch.y_last = y_last;
    int id = int(patches_.size());
    for (size_t i = x_first; i <= x_last; ++i)
      for (size_t j = y_first; j <= y_last; ++j) {
        set_cell(i, j, id, 0);
        set_cell(j, i, id, 1);
      }
    patches_.push_back(std::move(patch));
  }

  double value(double x, double y) const override {
    size_t ci = cell_index(x);
    size_t cj = cell_index(y);
    int id = cell_patch_[ci * cells() + cj];
    if (id < 0) return 0.0;
    const Patch& p = patches_[id];
    if (cell_flip_[ci * cells() + cj]) std::swap(x, y);
    double u = (x - p.x_lo) / p.x_len;
    double v = (y - p.y_lo) / p.y_len;
    return p.kernel->value(u, v);
  }

  std::string descriptor() const override {
    return "tiled(" + std::to_string(cells()) + " cells, " + std::to_string(patches_.size()) +
           " tiles)";
  }

  bool row_integral(double x, double lo, double hi, double* out) const override {
    size_t ci = cell_index(x);
    double total = 0.0;
    for (size_t cj = 0; cj < cells(); ++cj) {
      double a = std::max(lo, boundaries_d_[cj]);
      double b = std::min(hi, boundaries_d_[cj + 1]);
      if (b <= a) continue;
      int id = cell_patch_[ci * cells() + cj];
      if (id < 0) continue;
      const Patch& p = patches_[id];
      double piece = 0.0;
      if (!cell_flip_[ci * cells() + cj]) {
        double u = (x - p.x_lo) / p.x_len;
        if (!p.kernel->row_integral(u, (a - p.y_lo) / p.y_len, (b - p.y_lo) / p.y_len, &piece))
          return false;
        piece *= p.y_len;
      } else {
        // value(x, y) = kernel(rel(y), rel(x)); integrate the first argument.
        double v = (x - p.y_lo) / p.y_len;
        if (!p.kernel->column_integral((a - p.x_lo) / p.x_len, (b - p.x_lo) / p.x_len, v, &piece))
          return false;
        piece *= p.x_len;
      }
      total += piece;
    }
    *out = total;
    return true;
  }

  struct TileInfo {
    size_t x_first, x_last, y_first, y_last;
    const Kernel* kernel;
  };

  // Copy with every tile's kernel rewritten through fn; fn returns either the
  // original pointer or a replacement. Used by the mutation experiments.
  TiledGraphon transform_tiles(const std::function<KernelPtr(const TileInfo&, KernelPtr)>& fn) const {
    TiledGraphon out(partition_);
    for (const auto& p : patches_) {
      TileInfo info{p.x_first, p.x_last, p.y_first, p.y_last, p.kernel.get()};
      out.add_tile(p.x_first, p.x_last, p.y_first, p.y_last, fn(info, p.kernel));
    }
    return out;
  }

  // Copy with the tile anchored at (x_first, y_first) replaced by `kernel`.
  TiledGraphon with_tile(size_t x_first, size_t y_first, KernelPtr kernel) const {
    bool replaced = false;
    TiledGraphon out =
        transform_tiles([&](const TileInfo& info, KernelPtr original) -> KernelPtr {
          if (info.x_first == x_first && info.y_first == y_first) {
            replaced = true;
            return kernel;
          }
          return original;
        });
    if (!replaced) throw std::invalid_argument("no tile anchored at the given cells");
    return out;
  }

  const Kernel* tile_at_cells(size_t ci, size_t cj) const {
    int id = cell_patch_[ci * cells() + cj];
    return id < 0 ? nullptr : patches_[id].kernel.get();
  }

 private:
  struct Patch {
    KernelPtr kernel;
    double x_lo, x_len, y_lo, y_len;
    size_t x_first, x_last, y_first, y_last;
  };

  void set_cell(size_t i, size_t j, int id, uint8_t flip) {
    int& slot = cell_patch_[i * cells() + j];
    if (slot >= 0 && slot != id)
      throw OverlapError("cells (" + partition_[i].name + "," + partition_[j].name +
                         ") covered by two tiles");
    if (slot == id) return;  // diagonal tiles touch cells twice; first write wins
    slot = id;
    cell_flip_[i * cells() + j] = flip;
  }

  std::vector<PartSpan> partition_;
  std::vector<double> boundaries_d_;
  std::vector<Patch> patches_;
  std::vector<int> cell_patch_;
  std::vector<uint8_t> cell_flip_;
};

}  // namespace graphonlab
