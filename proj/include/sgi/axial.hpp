#pragma once

#include <Eigen/Core>
#include <utility>

#include "sgi/field.hpp"

namespace sgi {

// Bz and dBz/dz on the line x = 0 (the beam plane), from the exact kernel.
struct AxialValue {
  double bz;
  double dbz_dz;
};
AxialValue axial_field(const FieldModel& model, double y, double z);

// Same quantity with the z-dependence of every quadrature node expanded in
// Chebyshev polynomials on |z| <= z_range.  A slice fixes y; evaluating a
// slice at z costs one Clenshaw sum instead of 2 * nodes Bessel calls.
class AxialExpansion {
 public:
  AxialExpansion(const FieldModel& model, double z_range, int degree = 48);

  struct Slice {
    double y = 0.0;
    Eigen::VectorXd bz;  // Chebyshev coefficients of Bz(0, y, .)
    Eigen::VectorXd gz;  // and of dBz/dz(0, y, .)
  };

  Slice slice(double y) const;
  // Falls back to axial_field outside the fitted range.
  AxialValue eval(const Slice& s, double z) const;

  double z_range() const { return z_range_; }
  const FieldModel& model() const { return model_; }

 private:
  FieldModel model_;
  double z_range_;
  Eigen::MatrixXd first_;   // nodes x (degree+1), coefficients of d/dz line sum
  Eigen::MatrixXd second_;  // coefficients of d2/dz2 line sum
};

// Line sums on x = 0 for one node: d/dz and d2/dz2 of K0(k s_lo) + q K0(k s_hi).
std::pair<double, double> axial_line_derivatives(double k, double a, double q, double z);

}  // namespace sgi
