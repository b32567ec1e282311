#include "sgi/profile.hpp"

#include <cmath>
#include <numbers>

namespace sgi {

double b0_profile(double y, double alpha, double scale) {
  const double u = alpha * y;
  return scale * alpha / std::sqrt(2.0 * std::numbers::pi) *
         (std::exp(-0.5 * u * u) - std::numbers::sqrt2 * std::exp(-u * u));
}

double b0_spectrum(double k, double alpha) {
  // e^{-2v} - e^{-v} = e^{-v} (e^{-v} - 1), written with expm1 so that the
  // k -> 0 behaviour (~ -k^2/(4 alpha^2)) keeps full relative precision.
  const double v = k * k / (4.0 * alpha * alpha);
  return std::exp(-v) * std::expm1(-v);
}

double default_bias(double alpha_times_scale) {
  return 100.0 / std::abs(b0_profile(0.0, alpha_times_scale));
}

}  // namespace sgi
