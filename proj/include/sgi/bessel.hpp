#pragma once

namespace sgi {

// Modified Bessel functions of the second kind.  x <= 0 (or NaN) throws
// DomainError; large arguments underflow to 0.
double bessel_k0(double x);
double bessel_k1(double x);

}  // namespace sgi
