#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "sgi/fft.hpp"
#include "sgi/observables.hpp"
#include "sgi/spinor.hpp"
#include "sgi/timing.hpp"

namespace sgi {

// Potential energy on the grid at one instant.  Spin samples hold mu*B, so the
// spinor potential is -sigma.b; scalar samples hold V directly.  g is
// |grad V|^2 summed over axes (energy^2 / length^2); empty means zero.
struct PotentialSample {
  enum class Kind { none, spin, spin_z, scalar };
  Kind kind = Kind::none;
  Eigen::ArrayXd bx, by, bz;
  Eigen::ArrayXd scalar;
  Eigen::ArrayXd g;
  double time = 0.0;
};

class PotentialSource {
 public:
  virtual ~PotentialSource() = default;
  // Fills `out` for time t.  The gradient term is only needed for the middle
  // factor; sources may skip g when with_gradient is false.
  virtual void sample(const SpinorField& psi, double t, bool with_gradient,
                      PotentialSample& out) = 0;
};

struct StepFactor {
  enum class Kind { kinetic, potential };
  Kind kind;
  double coeff;
  double clock;   // time argument offset in units of the step, potential factors only
  bool gradient;  // middle factor carries the [t grad V]^2 correction
};

struct StepSchedule {
  double total_time = 0.0;
  long steps = 0;
  std::array<StepFactor, 5> factors{};

  double dt() const { return total_time / double(steps); }

  // V(T)/6, K/2, [2V/3 - gradient](T + t/2), K/2, V(T + t)/6, applied in this
  // order.  Kinetic coefficients multiply p^2/(2m); each kinetic factor
  // advances the clock by its coefficient.
  static StepSchedule seven_star(double total_time, long steps);
};

// Applies exp(-i coeff t V) pointwise.  For spin samples this is the SU(2)
// rotation cos(theta) + i sin(theta) n.sigma with theta = coeff t |b|.  With
// gradient set, both components also pick up exp(+i t^3 g / (72 m)).
void potential_step(SpinorField& field, const PotentialSample& sample, double coeff, double t,
                    bool gradient, double mass);

class SplitOperator {
 public:
  SplitOperator(const Grid& grid, double mass);

  // exp(-i coeff t p^2/(2m)) on both components.
  void kinetic_step(SpinorField& field, double coeff, double t);

  // One U7*T step of length t (t may be negative) starting at field.time.
  void step(SpinorField& field, PotentialSource& source, double t);
  // Same, with the end-of-step clock given explicitly (field.time + t up to
  // rounding).
  void step(SpinorField& field, PotentialSource& source, double t, double end_time);

  // Drop the cached end-of-step sample so the next step resamples V(T).
  void invalidate_cache() { cache_valid_ = false; }

  const PhaseTimer& timer() const { return timer_; }
  PhaseTimer& timer() { return timer_; }
  long transforms_executed() const { return fft_.executed(); }
  double mass() const { return mass_; }

 private:
  Grid grid_;
  double mass_;
  SpectralTransform fft_;
  Eigen::ArrayXd k2_;
  Eigen::ArrayXcd multiplier_;
  double multiplier_key_ = 0.0;
  bool multiplier_valid_ = false;
  StepSchedule shape_;
  PotentialSample cache_, work_;
  bool cache_valid_ = false;
  PhaseTimer timer_;
};

// Convenience wrappers building a temporary operator.
void kinetic_step(SpinorField& field, double coeff, double t, double mass);
void step_7star_T(SpinorField& field, PotentialSource& source, double t, double mass);

struct EvolveOptions {
  StepSchedule schedule;
  long start_step = 0;
  long observe_every = 0;      // 0: only the initial and final states
  long checkpoint_every = 0;   // 0: never
  double norm_tolerance = 1e-6;
  double boundary_tolerance = 1e-8;
  int boundary_margin = 4;
  std::vector<std::function<void(const SpinorField&, long step)>> observers;
  std::function<void(const SpinorField&, long step)> on_checkpoint;
  std::function<void(const ObservableRecord&)> on_record;  // every recorded entry
};

struct EvolveResult {
  std::vector<ObservableRecord> series;
  double initial_norm = 0.0;
  double max_norm_drift = 0.0;
  long steps_done = 0;
};

// Runs schedule.steps - start_step steps.  Norm drift beyond the tolerance or
// probability near the boundary aborts with NumericalFailure.
EvolveResult evolve(SpinorField& field, PotentialSource& source, SplitOperator& op,
                    const EvolveOptions& options);

}  // namespace sgi
