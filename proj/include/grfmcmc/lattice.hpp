#pragma once

#include <cstdint>
#include <vector>

#include "grfmcmc/errors.hpp"

namespace grfmcmc {

// Rectangular grid of +/-1 spins with free (non-wrapping) boundaries.
// Sites are indexed row-major; neighbourhoods are the 4 axis neighbours.
class SpinLattice {
 public:
  SpinLattice(int height, int width, std::int8_t fill = -1)
      : height_(height), width_(width), cells_(static_cast<std::size_t>(height) * width, fill) {
    if (height <= 0 || width <= 0) throw ContractError("SpinLattice: dimensions must be positive");
    if (fill != -1 && fill != 1) throw ContractError("SpinLattice: spins must be -1 or +1");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int size() const { return height_ * width_; }

  int index(int r, int c) const { return r * width_ + c; }

  int spin(int idx) const { return cells_[static_cast<std::size_t>(idx)]; }
  int spin(int r, int c) const { return cells_[static_cast<std::size_t>(index(r, c))]; }

  void set(int r, int c, int v) {
    if (v != -1 && v != 1) throw ContractError("SpinLattice: spins must be -1 or +1");
    cells_[static_cast<std::size_t>(index(r, c))] = static_cast<std::int8_t>(v);
  }

  void flip(int idx) { cells_[static_cast<std::size_t>(idx)] = -cells_[static_cast<std::size_t>(idx)]; }

  // Sum of the up/down/left/right spins that exist (free boundary).
  int neighbor_sum(int r, int c) const {
    int s = 0;
    if (r > 0) s += spin(r - 1, c);
    if (r + 1 < height_) s += spin(r + 1, c);
    if (c > 0) s += spin(r, c - 1);
    if (c + 1 < width_) s += spin(r, c + 1);
    return s;
  }

  int neighbor_sum(int idx) const { return neighbor_sum(idx / width_, idx % width_); }

  const std::vector<std::int8_t>& cells() const { return cells_; }

  bool operator==(const SpinLattice& o) const {
    return height_ == o.height_ && width_ == o.width_ && cells_ == o.cells_;
  }

 private:
  int height_;
  int width_;
  std::vector<std::int8_t> cells_;
};

}  // namespace grfmcmc
