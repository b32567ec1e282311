#pragma once

#include <Eigen/Core>
#include <array>

#include "sgi/field.hpp"

namespace sgi {

// Second-order Taylor surrogate of B around a centre.
struct QuadraticFieldPatch {
  Eigen::Vector3d center;
  Eigen::Vector3d value;
  Eigen::Matrix3d jacobian;                // (i, j) = d_i B_j
  std::array<Eigen::Matrix3d, 3> hessian;  // [k](i, j) = d_i d_j B_k
  double radius = 0.0;

  // B(center + d) = B + J^T d + d^T H d / 2 per component.
  Eigen::Vector3d eval(const Eigen::Vector3d& d) const {
    Eigen::Vector3d b = value + jacobian.transpose() * d;
    for (int k = 0; k < 3; ++k) b[k] += 0.5 * d.dot(hessian[k] * d);
    return b;
  }

  // Jacobian of the surrogate at center + d.
  Eigen::Matrix3d jacobian_at(const Eigen::Vector3d& d) const {
    Eigen::Matrix3d j = jacobian;
    for (int k = 0; k < 3; ++k) j.col(k) += hessian[k] * d;
    return j;
  }
};

// Throws GeometryError when a ball of the given radius around the centre
// reaches a charge line.
QuadraticFieldPatch make_patch(const Eigen::Vector3d& center, const FieldModel& model,
                               double radius);

}  // namespace sgi
