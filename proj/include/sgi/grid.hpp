#pragma once

#include <array>
#include <cstddef>

namespace sgi {

// Uniform periodic grid.  Axes are ordered (x, y, z) and stored row-major with
// z fastest.  A 1D grid keeps only the z axis active (nx = ny = 1).
// Coordinates are node-centred: x_i = (i - n/2) * h, so the origin is a node.
class Grid {
 public:
  Grid() = default;
  static Grid line(int nz, double extent_z);
  static Grid box(std::array<int, 3> n, std::array<double, 3> extent);

  int dims() const { return dims_; }
  bool active(int axis) const { return dims_ == 3 || axis == 2; }
  int points(int axis) const { return n_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  double spacing(int axis) const { return extent_[axis] / n_[axis]; }
  std::size_t size() const { return std::size_t(n_[0]) * n_[1] * n_[2]; }
  double cell_volume() const;

  double coord(int axis, int i) const { return (i - n_[axis] / 2) * spacing(axis); }
  // Angular wavenumber of FFT bin i (standard FFT ordering).
  double wavenumber(int axis, int i) const;

  std::size_t index(int ix, int iy, int iz) const {
    return (std::size_t(ix) * n_[1] + iy) * n_[2] + iz;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dims_ = 1;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> extent_{0, 0, 0};
};

bool is_power_of_two(int n);

}  // namespace sgi
