#include "sgi/axial.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sgi/bessel.hpp"
#include "sgi/errors.hpp"

namespace sgi {

std::pair<double, double> axial_line_derivatives(double k, double a, double q, double z) {
  const double s_lo = a + z;
  const double s_hi = a - z;
  const double x_lo = k * s_lo, x_hi = k * s_hi;
  const double k0_lo = bessel_k0(x_lo), k1_lo = bessel_k1(x_lo);
  const double k0_hi = bessel_k0(x_hi), k1_hi = bessel_k1(x_hi);
  // Along the z axis the unit vector towards the point is +z for the lower
  // line and -z for the upper one.
  const double first = -k * k1_lo + q * k * k1_hi;
  const double second = k * k * (k0_lo + k1_lo / x_lo) + q * k * k * (k0_hi + k1_hi / x_hi);
  return {first, second};
}

AxialValue axial_field(const FieldModel& model, double y, double z) {
  if (!(std::abs(z) < model.a())) {
    throw GeometryError("axial field requested outside the charge lines at z = " +
                        std::to_string(z));
  }
  const auto& ker = model.kernel();
  const double q = model.second_charge();
  double d1 = 0.0, d2 = 0.0;
  for (Eigen::Index i = 0; i < ker.k.size(); ++i) {
    const auto [first, second] = axial_line_derivatives(ker.k[i], model.a(), q, z);
    const double c = ker.w[i] * std::cos(ker.k[i] * y);
    d1 += c * first;
    d2 += c * second;
  }
  return {model.f() * (model.bias() - d1), -model.f() * d2};
}

AxialExpansion::AxialExpansion(const FieldModel& model, double z_range, int degree)
    : model_(model), z_range_(z_range) {
  if (!(z_range > 0.0 && z_range < model.a())) {
    throw GeometryError("axial expansion range must lie strictly inside the charge lines");
  }
  if (degree < 1) throw ConfigError("axial expansion degree must be positive");
  const int n = degree + 1;
  const auto& ker = model.kernel();
  const Eigen::Index nodes = ker.k.size();
  Eigen::MatrixXd f1(nodes, n), f2(nodes, n);
  for (int j = 0; j < n; ++j) {
    const double z = z_range * std::cos(std::numbers::pi * (j + 0.5) / n);
    for (Eigen::Index i = 0; i < nodes; ++i) {
      const auto [first, second] = axial_line_derivatives(ker.k[i], model.a(),
                                                          model.second_charge(), z);
      f1(i, j) = first;
      f2(i, j) = second;
    }
  }
  Eigen::MatrixXd basis(n, n);  // basis(j, m) = cos(pi m (j + 1/2) / n)
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) basis(j, m) = std::cos(std::numbers::pi * m * (j + 0.5) / n);
  basis *= 2.0 / n;
  basis.col(0) *= 0.5;
  first_ = f1 * basis;
  second_ = f2 * basis;
}

AxialExpansion::Slice AxialExpansion::slice(double y) const {
  const auto& ker = model_.kernel();
  const Eigen::VectorXd v = (ker.w * (ker.k * y).cos()).matrix();
  Slice s;
  s.y = y;
  s.bz = -model_.f() * (first_.transpose() * v);
  s.bz[0] += model_.f() * model_.bias();
  s.gz = -model_.f() * (second_.transpose() * v);
  return s;
}

namespace {

double clenshaw(const Eigen::VectorXd& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index n = c.size() - 1; n >= 1; --n) {
    const double b0 = 2.0 * t * b1 - b2 + c[n];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

AxialValue AxialExpansion::eval(const Slice& s, double z) const {
  if (std::abs(z) > z_range_) return axial_field(model_, s.y, z);
  const double t = z / z_range_;
  return {clenshaw(s.bz, t), clenshaw(s.gz, t)};
}

}  // namespace sgi
