#include "sgi/patch.hpp"

#include <fmt/format.h>

#include "sgi/errors.hpp"

namespace sgi {

QuadraticFieldPatch make_patch(const Eigen::Vector3d& center, const FieldModel& model,
                               double radius) {
  const double s_lo = distance_minus_line(center, model.a());
  const double s_hi = distance_plus_line(center, model.a());
  if (!(s_lo > radius && s_hi > radius)) {
    throw GeometryError(fmt::format(
        "patch of radius {:g} at ({:g}, {:g}, {:g}) reaches a charge line (s = {:g}, {:g})",
        radius, center.x(), center.y(), center.z(), s_lo, s_hi));
  }
  const FieldDerivatives d = field_derivatives(center, model);
  return {center, d.value, d.jacobian, d.hessian, radius};
}

}  // namespace sgi
