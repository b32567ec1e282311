#pragma once

namespace sgi {

// On-axis design profile, two gaussians with zero net integral:
//   scale * alpha/sqrt(2 pi) * [exp(-(alpha y)^2/2) - sqrt(2) exp(-(alpha y)^2)]
// With scale = 1 and y, alpha in matching units this is the bare profile.
double b0_profile(double y, double alpha, double scale = 1.0);

// Fourier transform of the bare profile: exp(-k^2/(2 alpha^2)) - exp(-k^2/(4 alpha^2)).
double b0_spectrum(double k, double alpha);

// Bias that makes the profile peak 100 times weaker than the bias: 100/|b0(0)|.
double default_bias(double alpha_times_scale);

}  // namespace sgi
