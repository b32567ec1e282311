#include "sgi/bessel.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <string>

#include "sgi/errors.hpp"

namespace sgi {
namespace {

// Stay in double precision; Boost's default promotes to long double, which
// is four times slower for no gain at our tolerance.
using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

void check_argument(double x) {
  if (!(x > 0.0)) throw DomainError("modified Bessel K needs x > 0, got " + std::to_string(x));
}

}  // namespace

double bessel_k0(double x) {
  check_argument(x);
  if (x > 745.0) return 0.0;
  return boost::math::cyl_bessel_k(0, x, Policy());
}

double bessel_k1(double x) {
  check_argument(x);
  if (x > 745.0) return 0.0;
  return boost::math::cyl_bessel_k(1, x, Policy());
}

}  // namespace sgi
