#pragma once

#include <Eigen/Core>
#include <vector>

#include "sgi/field.hpp"
#include "sgi/params.hpp"

namespace sgi {

// axial:     z only, y = y0 + v t prescribed, force +-mu dBz/dz on x = 0.  The
//            classical counterpart of the simplified 1D Hamiltonian.
// adiabatic: full 3D motion in U = -+mu |B(r)|.
enum class ForceModel { axial, adiabatic };

struct TrajectorySample {
  double t;
  Eigen::Vector3d r;
  Eigen::Vector3d v;
};

struct Trajectory {
  int branch = 1;
  std::vector<TrajectorySample> samples;
  double z_half = 0.0;    // z(T/2)
  double z_final = 0.0;   // z(T)
  double y_offset = 0.0;  // y(T) - L/2
  double max_abs_z = 0.0;
  double max_transverse_momentum_z = 0.0;
  double max_transverse_momentum_y = 0.0;
  double max_abs_y_offset = 0.0;  // max |y(t) - (y0 + v t)|
  double max_energy_drift = 0.0;  // relative, adiabatic model only
};

struct TrajectoryOptions {
  long n_steps = 200000;
  ForceModel model = ForceModel::axial;
  long record_every = 0;  // 0: about 1000 samples
};

// Axial-model integrator for one geometry.  The on-axis gradient slices at
// every half step are tabulated once for f = 1; the force is linear in f, so
// runs at different strengths reuse the table.
class AxialIntegrator {
 public:
  AxialIntegrator(const FieldModel& model, const PhysParams& p, long n_steps);
  Trajectory run(int branch, double f, long record_every = 0) const;

 private:
  FieldModel unit_;  // model with f = 1
  PhysParams p_;
  long n_;
  double z_range_;
  Eigen::MatrixXd slices_;  // Chebyshev coefficients of dBz/dz, one column per half step
  Eigen::VectorXd y_;       // y at each half step
};

// Branch +1 is spin up (force +mu grad|B|), -1 spin down.  RK4 from
// (0, y0, 0) with velocity (0, v, 0).  Leaving |z| < a throws GeometryError.
Trajectory classical_trajectory(int branch, const FieldModel& model, const PhysParams& p,
                                const TrajectoryOptions& options = {});

}  // namespace sgi
