#include "sgi/propagator.hpp"

#include <cmath>
#include <complex>
#include <fmt/format.h>

#include "sgi/errors.hpp"

namespace sgi {

using cd = std::complex<double>;

StepSchedule StepSchedule::seven_star(double total_time, long steps) {
  if (steps < 1) throw ConfigError("step count must be positive");
  StepSchedule s;
  s.total_time = total_time;
  s.steps = steps;
  using K = StepFactor::Kind;
  s.factors = {{
      {K::potential, 1.0 / 6.0, 0.0, false},
      {K::kinetic, 0.5, 0.0, false},
      {K::potential, 2.0 / 3.0, 0.5, true},
      {K::kinetic, 0.5, 0.0, false},
      {K::potential, 1.0 / 6.0, 1.0, false},
  }};
  return s;
}

void potential_step(SpinorField& field, const PotentialSample& sample, double coeff, double t,
                    bool gradient, double mass) {
  using Kind = PotentialSample::Kind;
  const Eigen::Index n = field.up.size();
  const bool has_g = gradient && sample.g.size() == n;
  const double gcoef = t * t * t / (72.0 * mass);
  auto& up = field.up;
  auto& dn = field.down;

  switch (sample.kind) {
    case Kind::none:
      if (has_g) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) {
          const cd ph = std::polar(1.0, gcoef * sample.g[i]);
          up[i] *= ph;
          dn[i] *= ph;
        }
      }
      break;
    case Kind::scalar:
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < n; ++i) {
        double phase = -coeff * t * sample.scalar[i];
        if (has_g) phase += gcoef * sample.g[i];
        const cd ph = std::polar(1.0, phase);
        up[i] *= ph;
        dn[i] *= ph;
      }
      break;
    case Kind::spin_z:
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < n; ++i) {
        const double theta = coeff * t * sample.bz[i];
        const double common = has_g ? gcoef * sample.g[i] : 0.0;
        up[i] *= std::polar(1.0, common + theta);
        dn[i] *= std::polar(1.0, common - theta);
      }
      break;
    case Kind::spin:
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < n; ++i) {
        const double bx = sample.bx[i], by = sample.by[i], bz = sample.bz[i];
        const double b = std::sqrt(bx * bx + by * by + bz * bz);
        cd u = up[i], d = dn[i];
        if (b > 0.0) {
          const double theta = coeff * t * b;
          const double c = std::cos(theta);
          const double s = std::sin(theta) / b;
          // c + i s (b.sigma), with s already divided by |b|.
          const cd u00(c, s * bz), u11(c, -s * bz);
          const cd u01(s * by, s * bx), u10(-s * by, s * bx);
          const cd nu = u00 * u + u01 * d;
          const cd nd = u10 * u + u11 * d;
          u = nu;
          d = nd;
        }
        if (has_g) {
          const cd ph = std::polar(1.0, gcoef * sample.g[i]);
          u *= ph;
          d *= ph;
        }
        up[i] = u;
        dn[i] = d;
      }
      break;
  }
}

SplitOperator::SplitOperator(const Grid& grid, double mass)
    : grid_(grid), mass_(mass), fft_(grid), shape_(StepSchedule::seven_star(1.0, 1)) {
  k2_.resize(grid.size());
  const int nx = grid.points(0), ny = grid.points(1), nz = grid.points(2);
  for (int ix = 0; ix < nx; ++ix) {
    const double kx = grid.active(0) ? grid.wavenumber(0, ix) : 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      const double ky = grid.active(1) ? grid.wavenumber(1, iy) : 0.0;
      for (int iz = 0; iz < nz; ++iz) {
        const double kz = grid.wavenumber(2, iz);
        k2_[grid.index(ix, iy, iz)] = kx * kx + ky * ky + kz * kz;
      }
    }
  }
}

void SplitOperator::kinetic_step(SpinorField& field, double coeff, double t) {
  if (!(field.grid == grid_)) throw GridMismatchError("kinetic step on a field from another grid");
  if (coeff == 0.0 || t == 0.0) return;
  const double key = coeff * t;
  if (!multiplier_valid_ || multiplier_key_ != key) {
    PhaseTimer::Scope scope(timer_, Phase::momentum);
    // The 1/N of the forward/inverse pair is folded in here.
    const double scale = 1.0 / double(grid_.size());
    const double c = -key / (2.0 * mass_);
    multiplier_.resize(k2_.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < k2_.size(); ++i) multiplier_[i] = std::polar(scale, c * k2_[i]);
    multiplier_key_ = key;
    multiplier_valid_ = true;
  }
  for (Eigen::ArrayXcd* comp : {&field.up, &field.down}) {
    {
      PhaseTimer::Scope scope(timer_, Phase::transforms);
      fft_.forward_raw(*comp);
    }
    {
      PhaseTimer::Scope scope(timer_, Phase::momentum);
      *comp *= multiplier_;
    }
    {
      PhaseTimer::Scope scope(timer_, Phase::transforms);
      fft_.inverse_raw(*comp);
    }
  }
}

void SplitOperator::step(SpinorField& field, PotentialSource& source, double t) {
  step(field, source, t, field.time + t);
}

void SplitOperator::step(SpinorField& field, PotentialSource& source, double t, double end_time) {
  const double t0 = field.time;
  for (const StepFactor& fac : shape_.factors) {
    if (fac.kind == StepFactor::Kind::kinetic) {
      kinetic_step(field, fac.coeff, t);
      continue;
    }
    PhaseTimer::Scope scope(timer_, Phase::potential);
    const double when = fac.clock == 1.0 ? end_time : t0 + fac.clock * t;
    const PotentialSample* s = nullptr;
    if (fac.clock == 0.0 && cache_valid_ && cache_.time == when) {
      s = &cache_;
    } else {
      source.sample(field, when, fac.gradient, work_);
      work_.time = when;
      s = &work_;
    }
    potential_step(field, *s, fac.coeff, t, fac.gradient, mass_);
    if (fac.clock == 1.0) {
      std::swap(cache_, work_);
      cache_valid_ = true;
    }
  }
  field.time = end_time;
}

void kinetic_step(SpinorField& field, double coeff, double t, double mass) {
  SplitOperator op(field.grid, mass);
  op.kinetic_step(field, coeff, t);
}

void step_7star_T(SpinorField& field, PotentialSource& source, double t, double mass) {
  SplitOperator op(field.grid, mass);
  op.step(field, source, t);
}

namespace {

void check_state(const SpinorField& field, const EvolveOptions& opt, double norm0, double n,
                 long step, EvolveResult& res) {
  const double drift = std::abs(n - norm0);
  res.max_norm_drift = std::max(res.max_norm_drift, drift);
  if (!(drift <= opt.norm_tolerance)) {
    throw NumericalFailure(fmt::format(
        "norm drift {:.3e} exceeds {:.1e} at step {} (t = {:.17g}, norm = {:.17g})", drift,
        opt.norm_tolerance, step, field.time, n));
  }
  const double edge = boundary_probability(field, opt.boundary_margin);
  if (edge > opt.boundary_tolerance) {
    throw NumericalFailure(fmt::format(
        "probability {:.3e} within {} points of the grid boundary at step {} (t = {:.17g}); "
        "enlarge the grid",
        edge, opt.boundary_margin, step, field.time));
  }
}

}  // namespace

EvolveResult evolve(SpinorField& field, PotentialSource& source, SplitOperator& op,
                    const EvolveOptions& opt) {
  const StepSchedule& sched = opt.schedule;
  if (sched.steps < 1) throw ConfigError("schedule needs at least one step");
  if (opt.start_step < 0 || opt.start_step > sched.steps) {
    throw ConfigError("start step outside the schedule");
  }
  const double dt = sched.dt();
  EvolveResult res;

  auto record = [&](long step) {
    ObservableRecord rec;
    {
      PhaseTimer::Scope scope(op.timer(), Phase::observables);
      rec = observe(field);
      check_state(field, opt, res.initial_norm, rec.norm, step, res);
    }
    res.series.push_back(rec);
    if (opt.on_record) opt.on_record(rec);
    for (const auto& obs : opt.observers) obs(field, step);
  };

  {
    PhaseTimer::Scope scope(op.timer(), Phase::observables);
    res.initial_norm = norm(field);
  }
  // A resumed run starts from a state that was normalized when it was created.
  if (opt.start_step > 0) res.initial_norm = 1.0;
  record(opt.start_step);

  for (long step = opt.start_step + 1; step <= sched.steps; ++step) {
    // The clock is recomputed from the step index so it never accumulates
    // rounding across long runs.
    op.step(field, source, dt, step * dt);
    ++res.steps_done;
    const bool last = step == sched.steps;
    const bool observe_now = last || (opt.observe_every > 0 && step % opt.observe_every == 0);
    if (observe_now) record(step);
    if (opt.checkpoint_every > 0 && step % opt.checkpoint_every == 0) {
      // Resampling after every checkpoint keeps resumed runs bit-identical.
      op.invalidate_cache();
      if (opt.on_checkpoint) opt.on_checkpoint(field, step);
    }
  }
  return res;
}

}  // namespace sgi
