#pragma once

#include <string>
#include <vector>

#include "sgi/field.hpp"
#include "sgi/params.hpp"
#include "sgi/trajectory.hpp"

namespace sgi {

struct SearchBox {
  double a_min, a_max;  // internal length
  double f_min, f_max;
};

struct CalibrationOptions {
  long n_steps = 10000;
  ForceModel model = ForceModel::axial;
  double final_tolerance = 1e-7;  // in units of delta
  double peak_tolerance = 1e-3;   // in units of delta
  double f_relative_tolerance = 1e-11;
  int max_outer = 60;
  int max_inner = 200;
};

struct CalibrationResult {
  double target = 0.0;   // internal length
  double a = 0.0;
  double f = 0.0;
  double dz_half = 0.0;  // achieved dZ(T/2)
  double dz_final = 0.0; // achieved dZ(T)
  int outer_iterations = 0;
  int inner_iterations = 0;  // total trajectory pairs evaluated
  bool converged = false;
};

struct Separation {
  double half;   // dZ(T/2)
  double final;  // dZ(T)
};

// dZ = z_up - z_down at T/2 and T.  The axial model is mirror-symmetric, so
// one branch is integrated and doubled; the adiabatic model runs both.
Separation classical_separation(const FieldModel& model, const PhysParams& p,
                                const TrajectoryOptions& options);

// Default box: a in [0.3, 4] um, f in [0, 0.05].
SearchBox default_search_box();

// Alternating bisection: inner on f for dZ(T/2) = target, outer on a for
// dZ(T) = 0.  `base` supplies alpha, B0, arrangement and quadrature.
CalibrationResult calibrate(double target, const PhysParams& p, const FieldModel& base,
                            const SearchBox& box, const CalibrationOptions& options = {});

}  // namespace sgi
