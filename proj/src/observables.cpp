#include "sgi/observables.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "sgi/errors.hpp"
#include "sgi/reduce.hpp"

namespace sgi {

using Eigen::Vector3d;

namespace {

// Sums: [0] |u|^2, [1] |d|^2, [2] Re u*d, [3] Im u*d, [4..6] x|u|^2,
// [7..9] x|d|^2, [10..12] x^2|u|^2, [13..15] x^2|d|^2.
using Moments = Eigen::Matrix<double, 16, 1>;

Moments moments(const SpinorField& field) {
  const Grid& g = field.grid;
  const int ny = g.points(1), nz = g.points(2);
  const auto& u = field.up;
  const auto& d = field.down;
  Moments m = ordered_sum<16>(g.size(), [&](std::size_t i) {
    const int iz = int(i % nz);
    const int iy = int((i / nz) % ny);
    const int ix = int(i / (std::size_t(nz) * ny));
    const Vector3d r(g.active(0) ? g.coord(0, ix) : 0.0, g.active(1) ? g.coord(1, iy) : 0.0,
                     g.coord(2, iz));
    const double pu = std::norm(u[i]);
    const double pd = std::norm(d[i]);
    const std::complex<double> c = std::conj(u[i]) * d[i];
    Moments v;
    v << pu, pd, c.real(), c.imag(), pu * r, pd * r, pu * r.cwiseAbs2(), pd * r.cwiseAbs2();
    return v;
  });
  return m * g.cell_volume();
}

Vector3d spin_from(const Moments& m) {
  const double total = m[0] + m[1];
  if (!(total > 0.0)) throw DegenerateStateError("spin expectation of a zero-norm state");
  return Vector3d(2.0 * m[2], 2.0 * m[3], m[0] - m[1]) / total;
}

}  // namespace

ObservableRecord observe(const SpinorField& field) {
  const Moments m = moments(field);
  ObservableRecord rec;
  rec.time = field.time;
  rec.norm = std::sqrt(m[0] + m[1]);
  rec.spin = spin_from(m);
  rec.coherence = rec.spin.squaredNorm();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double total = m[0] + m[1];
  auto fill = [&](double w, int first, int second, Vector3d& c, Vector3d& width) {
    if (w <= 1e-12 * total) {
      c.setConstant(nan);
      width.setConstant(nan);
      return;
    }
    c = m.segment<3>(first) / w;
    width = (m.segment<3>(second) / w - c.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
  };
  fill(m[0], 4, 10, rec.centroid_up, rec.width_up);
  fill(m[1], 7, 13, rec.centroid_down, rec.width_down);
  rec.dz = rec.centroid_up.z() - rec.centroid_down.z();
  rec.dy = rec.centroid_up.y() - rec.centroid_down.y();
  return rec;
}

Vector3d spin_expectation(const SpinorField& field) { return spin_from(moments(field)); }

Eigen::Matrix2cd statistical_operator(const Vector3d& s) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  m << C(1.0 + s.z(), 0.0), C(s.x(), -s.y()), C(s.x(), s.y()), C(1.0 - s.z(), 0.0);
  return 0.5 * m;
}

double purity(const Eigen::Matrix2cd& rho) {
  return 2.0 * (rho * rho.adjoint()).trace().real() - 1.0;
}

double coherence(const SpinorField& field) {
  const Vector3d s = spin_expectation(field);
  const double c = s.squaredNorm();
  const double check = purity(statistical_operator(s));
  if (std::abs(check - c) > 1e-12) {
    throw NumericalFailure(fmt::format("purity cross-check failed: C = {:.17g}, 2tr(MM+)-1 = {:.17g}",
                                       c, check));
  }
  return c;
}

Eigen::Matrix2cd reduced_density_matrix(const SpinorField& field) {
  const auto& u = field.up;
  const auto& d = field.down;
  const auto s = ordered_sum<4>(u.size(), [&](std::size_t i) {
    const std::complex<double> ud = u[i] * std::conj(d[i]);
    return Eigen::Vector4d(std::norm(u[i]), std::norm(d[i]), ud.real(), ud.imag());
  });
  const double total = s[0] + s[1];
  if (!(total > 0.0)) throw DegenerateStateError("density matrix of a zero-norm state");
  Eigen::Matrix2cd rho;
  rho << s[0], std::complex<double>(s[2], s[3]), std::complex<double>(s[2], -s[3]), s[1];
  return rho / total;
}

ComponentCentroids component_centroids(const SpinorField& field) {
  const Moments m = moments(field);
  ComponentCentroids c;
  c.weight_up = m[0];
  c.weight_down = m[1];
  c.up = m[0] > 0.0 ? Vector3d(m.segment<3>(4) / m[0]) : Vector3d::Zero();
  c.down = m[1] > 0.0 ? Vector3d(m.segment<3>(7) / m[1]) : Vector3d::Zero();
  return c;
}

std::pair<double, double> separations(const SpinorField& field) {
  const Moments m = moments(field);
  const double total = m[0] + m[1];
  if (!(m[0] > 1e-12 * total && m[1] > 1e-12 * total)) {
    throw DegenerateStateError("separation undefined: a spin component vanishes");
  }
  const Vector3d cu = m.segment<3>(4) / m[0];
  const Vector3d cd = m.segment<3>(7) / m[1];
  return {cu.z() - cd.z(), cu.y() - cd.y()};
}

double boundary_probability(const SpinorField& field, int margin) {
  const Grid& g = field.grid;
  const int ny = g.points(1), nz = g.points(2);
  auto near = [&](int axis, int i) {
    return g.active(axis) && (i < margin || i >= g.points(axis) - margin);
  };
  const auto& u = field.up;
  const auto& d = field.down;
  const double s = ordered_sum<1>(g.size(), [&](std::size_t i) {
    const int iz = int(i % nz);
    const int iy = int((i / nz) % ny);
    const int ix = int(i / (std::size_t(nz) * ny));
    const bool edge = near(0, ix) || near(1, iy) || near(2, iz);
    return Eigen::Matrix<double, 1, 1>(edge ? std::norm(u[i]) + std::norm(d[i]) : 0.0);
  })[0];
  return s * g.cell_volume();
}

}  // namespace sgi
