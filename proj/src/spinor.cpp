#include "sgi/spinor.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "sgi/errors.hpp"
#include "sgi/reduce.hpp"

namespace sgi {

double gaussian_amplitude(double r2, double delta, int dims) {
  const double norm = std::pow(std::numbers::pi, -0.25 * dims) * std::pow(delta, -0.5 * dims);
  return norm * std::exp(-0.5 * r2 / (delta * delta));
}

Eigen::ArrayXd sample_gaussian(const Grid& grid, double delta) {
  Eigen::ArrayXd out(grid.size());
  const int nx = grid.points(0), ny = grid.points(1), nz = grid.points(2);
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < nx; ++ix) {
    const double x = grid.active(0) ? grid.coord(0, ix) : 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      const double y = grid.active(1) ? grid.coord(1, iy) : 0.0;
      for (int iz = 0; iz < nz; ++iz) {
        const double z = grid.coord(2, iz);
        out[grid.index(ix, iy, iz)] = gaussian_amplitude(x * x + y * y + z * z, delta, grid.dims());
      }
    }
  }
  return out;
}

SpinorField make_gaussian_packet(const Grid& grid, const PhysParams& p) {
  for (int a = 0; a < 3; ++a) {
    if (grid.active(a) && 0.5 * grid.extent(a) < 4.0 * p.delta) {
      throw GeometryError(fmt::format("grid axis {} half-extent {:g} cannot hold 4 delta = {:g}",
                                      a, 0.5 * grid.extent(a), 4.0 * p.delta));
    }
  }
  const Eigen::ArrayXd psi = sample_gaussian(grid, p.delta);
  const double raw = std::sqrt(
      ordered_sum<1>(psi.size(), [&](std::size_t i) {
        return Eigen::Matrix<double, 1, 1>(psi[i] * psi[i]);
      })[0] * grid.cell_volume());
  SpinorField field(grid);
  const double c = 1.0 / (std::numbers::sqrt2 * raw);
  field.up = (psi * c).cast<std::complex<double>>();
  field.down = field.up;
  return field;
}

double norm(const SpinorField& field) {
  const auto& u = field.up;
  const auto& d = field.down;
  const double s = ordered_sum<1>(u.size(), [&](std::size_t i) {
    return Eigen::Matrix<double, 1, 1>(std::norm(u[i]) + std::norm(d[i]));
  })[0];
  return std::sqrt(s * field.grid.cell_volume());
}

}  // namespace sgi
