#include "sgi/grid.hpp"

#include <numbers>
#include <string>

#include "sgi/errors.hpp"

namespace sgi {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

void check_axis(int n, double extent, const char* name) {
  if (!is_power_of_two(n)) {
    throw GeometryError(std::string("grid axis ") + name + ": point count " + std::to_string(n) +
                        " is not a power of two");
  }
  if (!(extent > 0.0)) throw GeometryError(std::string("grid axis ") + name + ": extent must be positive");
}

}  // namespace

Grid Grid::line(int nz, double extent_z) {
  check_axis(nz, extent_z, "z");
  Grid g;
  g.dims_ = 1;
  g.n_ = {1, 1, nz};
  g.extent_ = {1.0, 1.0, extent_z};
  return g;
}

Grid Grid::box(std::array<int, 3> n, std::array<double, 3> extent) {
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) check_axis(n[a], extent[a], names[a]);
  Grid g;
  g.dims_ = 3;
  g.n_ = n;
  g.extent_ = extent;
  return g;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < 3; ++a)
    if (active(a)) v *= spacing(a);
  return v;
}

double Grid::wavenumber(int axis, int i) const {
  const int n = n_[axis];
  const int m = i < (n + 1) / 2 ? i : i - n;
  return 2.0 * std::numbers::pi * m / extent_[axis];
}

}  // namespace sgi
