#include "sgi/trajectory.hpp"

#include <cmath>
#include <fmt/format.h>

#include "sgi/axial.hpp"
#include "sgi/errors.hpp"

namespace sgi {

using Eigen::Vector3d;

namespace {

void check_inside(double z, double a, double t) {
  if (!(std::abs(z) < a)) {
    throw GeometryError(fmt::format(
        "trajectory left the region between the charge lines: z = {:g} at t = {:g} (a = {:g})", z,
        t, a));
  }
}


double clenshaw(const double* c, int n, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

AxialIntegrator::AxialIntegrator(const FieldModel& model, const PhysParams& p, long n_steps)
    : unit_(model.with(model.a(), 1.0)), p_(p), n_(n_steps), z_range_(0.5 * model.a()) {
  if (n_steps < 1) throw ConfigError("integrator needs at least one step");
  const AxialExpansion expansion(unit_, z_range_);
  const long halves = 2 * n_steps + 1;
  const double h = p.duration / double(n_steps);
  y_.resize(halves);
  for (long j = 0; j < halves; ++j) y_[j] = p.y_start + p.speed() * (0.5 * h * j);
  const AxialExpansion::Slice probe = expansion.slice(y_[0]);
  slices_.resize(probe.gz.size(), halves);
  for (long j = 0; j < halves; ++j) slices_.col(j) = expansion.slice(y_[j]).gz;
}

Trajectory AxialIntegrator::run(int branch, double f, long record_every) const {
  const long n = n_;
  const double h = p_.duration / double(n);
  const double coef = branch * p_.moment * f / p_.mass;
  const double a = unit_.a();
  const int nc = int(slices_.rows());
  const long stride = record_every > 0 ? record_every : std::max<long>(1, n / 1000);

  auto force = [&](long half, double z) {
    if (std::abs(z) <= z_range_) return coef * clenshaw(slices_.col(half).data(), nc, z / z_range_);
    check_inside(z, a, 0.5 * h * half);
    return coef * axial_field(unit_, y_[half], z).dbz_dz;
  };

  Trajectory tr;
  tr.branch = branch;
  double z = 0.0, v = 0.0;
  tr.samples.push_back({0.0, Vector3d(0.0, y_[0], 0.0), Vector3d(0.0, p_.speed(), 0.0)});
  for (long i = 0; i < n; ++i) {
    const double t = i * h;
    const double k1z = v, k1v = force(2 * i, z);
    const double k2z = v + 0.5 * h * k1v, k2v = force(2 * i + 1, z + 0.5 * h * k1z);
    const double k3z = v + 0.5 * h * k2v, k3v = force(2 * i + 1, z + 0.5 * h * k2z);
    const double k4z = v + h * k3v, k4v = force(2 * i + 2, z + h * k3z);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    check_inside(z, a, t + h);
    tr.max_abs_z = std::max(tr.max_abs_z, std::abs(z));
    tr.max_transverse_momentum_z = std::max(tr.max_transverse_momentum_z, p_.mass * std::abs(v));
    if (2 * (i + 1) == n) tr.z_half = z;
    if ((i + 1) % stride == 0 || i + 1 == n) {
      tr.samples.push_back({t + h, Vector3d(0.0, y_[2 * i + 2], z), Vector3d(0.0, p_.speed(), v)});
    }
  }
  tr.z_final = z;
  return tr;
}

namespace {

struct State {
  Vector3d r, v;
};

Trajectory integrate_adiabatic(int branch, const FieldModel& model, const PhysParams& p,
                               const TrajectoryOptions& opt) {
  const long n = opt.n_steps;
  const double h = p.duration / double(n);
  const double coef = branch * p.moment / p.mass;
  const long stride = opt.record_every > 0 ? opt.record_every : std::max<long>(1, n / 1000);

  auto accel = [&](const Vector3d& r, double t, double* bnorm) {
    check_inside(r.z(), model.a(), t);
    const FieldDerivatives fd = field_and_jacobian(r, model);
    const double b = fd.value.norm();
    if (bnorm) *bnorm = b;
    if (b == 0.0) {
      // A vanishing field with vanishing gradient (f = 0) exerts no force.
      if (fd.jacobian.isZero(0.0)) return Vector3d(Vector3d::Zero());
      throw SingularityError("adiabatic force undefined where |B| = 0");
    }
    return Vector3d(coef * fd.jacobian * fd.value / b);
  };
  auto energy = [&](const State& s, double b) {
    return 0.5 * p.mass * s.v.squaredNorm() - branch * p.moment * b;
  };

  Trajectory tr;
  tr.branch = branch;
  State s{Vector3d(0.0, p.y_start, 0.0), Vector3d(0.0, p.speed(), 0.0)};
  double b0 = 0.0;
  Vector3d a0 = accel(s.r, 0.0, &b0);
  const double e0 = energy(s, b0);
  tr.samples.push_back({0.0, s.r, s.v});
  for (long i = 0; i < n; ++i) {
    const double t = i * h;
    const Vector3d k1r = s.v, k1v = a0;
    const Vector3d k2r = s.v + 0.5 * h * k1v, k2v = accel(s.r + 0.5 * h * k1r, t, nullptr);
    const Vector3d k3r = s.v + 0.5 * h * k2v, k3v = accel(s.r + 0.5 * h * k2r, t, nullptr);
    const Vector3d k4r = s.v + h * k3v, k4v = accel(s.r + h * k3r, t, nullptr);
    s.r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    s.v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    double b = 0.0;
    a0 = accel(s.r, t + h, &b);
    const double tn = (i + 1) * h;
    tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(energy(s, b) - e0) / std::abs(e0));
    tr.max_abs_z = std::max(tr.max_abs_z, std::abs(s.r.z()));
    tr.max_transverse_momentum_z = std::max(tr.max_transverse_momentum_z, p.mass * std::abs(s.v.z()));
    tr.max_transverse_momentum_y =
        std::max(tr.max_transverse_momentum_y, p.mass * std::abs(s.v.y() - p.speed()));
    tr.max_abs_y_offset =
        std::max(tr.max_abs_y_offset, std::abs(s.r.y() - (p.y_start + p.speed() * tn)));
    if (2 * (i + 1) == n) tr.z_half = s.r.z();
    if ((i + 1) % stride == 0 || i + 1 == n) tr.samples.push_back({tn, s.r, s.v});
  }
  tr.z_final = s.r.z();
  tr.y_offset = s.r.y() - (p.y_start + p.length);
  return tr;
}

}  // namespace

Trajectory classical_trajectory(int branch, const FieldModel& model, const PhysParams& p,
                                const TrajectoryOptions& options) {
  if (branch != 1 && branch != -1) throw ConfigError("trajectory branch must be +1 or -1");
  if (options.n_steps < 10000) throw ConfigError("classical trajectories need at least 1e4 steps");
  if (options.n_steps % 2 != 0) throw ConfigError("classical step count must be even");
  if (options.model == ForceModel::axial) {
    return AxialIntegrator(model, p, options.n_steps).run(branch, model.f(), options.record_every);
  }
  return integrate_adiabatic(branch, model, p, options);
}

}  // namespace sgi
