#include "sgi/calibration.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <optional>

#include "sgi/errors.hpp"
#include "sgi/units.hpp"

namespace sgi {

Separation classical_separation(const FieldModel& model, const PhysParams& p,
                                const TrajectoryOptions& options) {
  if (options.model == ForceModel::axial) {
    const Trajectory up = classical_trajectory(1, model, p, options);
    return {2.0 * up.z_half, 2.0 * up.z_final};
  }
  const Trajectory up = classical_trajectory(1, model, p, options);
  const Trajectory dn = classical_trajectory(-1, model, p, options);
  return {up.z_half - dn.z_half, up.z_final - dn.z_final};
}

SearchBox default_search_box() { return {um(0.3), um(4.0), 0.0, 0.05}; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Separation evaluator at fixed a.  Leaving the region between the lines
// counts as an overshoot of the peak.
class FixedGeometry {
 public:
  FixedGeometry(const FieldModel& base, double a, const PhysParams& p, const CalibrationOptions& o)
      : model_(base.with(a, 1.0)), p_(p), opt_(o) {
    if (o.model == ForceModel::axial) axial_.emplace(model_, p, o.n_steps);
  }

  std::optional<Separation> operator()(double f) {
    ++evaluations;
    if (f == 0.0) return Separation{0.0, 0.0};
    try {
      if (axial_) {
        const Trajectory tr = axial_->run(1, f, opt_.n_steps);
        return Separation{2.0 * tr.z_half, 2.0 * tr.z_final};
      }
      TrajectoryOptions t{opt_.n_steps, opt_.model, opt_.n_steps};
      return classical_separation(model_.with(model_.a(), f), p_, t);
    } catch (const GeometryError&) {
      return std::nullopt;
    }
  }

  int evaluations = 0;

 private:
  FieldModel model_;
  PhysParams p_;
  CalibrationOptions opt_;
  std::optional<AxialIntegrator> axial_;
};

double peak(const std::optional<Separation>& s) { return s ? std::abs(s->half) : kInf; }

struct InnerSolution {
  double f;
  Separation sep;
};

// Bisection on f for |dZ(T/2)| = target.  `hint` (if positive) seeds a narrow
// bracket that is widened until it straddles the target.
InnerSolution solve_f(FixedGeometry& eval, double target, double hint, double hint_width,
                      const SearchBox& box, const CalibrationOptions& opt, double a) {
  double lo = box.f_min, hi = box.f_max;
  std::optional<Separation> s_lo = eval(lo), s_hi = eval(hi);
  double p_lo = peak(s_lo), p_hi = peak(s_hi);
  if (!(p_lo <= target && target <= p_hi)) {
    throw SearchFailure(fmt::format(
        "f range [{:g}, {:g}] does not bracket peak separation {:g} um at a = {:g} um "
        "(peaks {:g} and {:g} um)",
        lo, hi, to_um(target), to_um(a), to_um(p_lo), to_um(p_hi)));
  }

  // Evaluates x inside (lo, hi), keeps the bracket and checks monotonicity.
  auto probe = [&](double x) {
    if (!(x > lo && x < hi)) return;
    const std::optional<Separation> s = eval(x);
    const double px = peak(s);
    if (px < p_lo || px > p_hi) {
      throw NumericalFailure(fmt::format(
          "peak separation is not monotonic in f at a = {:g} um (f = {:.12g})", to_um(a), x));
    }
    if (px < target) {
      lo = x, p_lo = px, s_lo = s;
    } else {
      hi = x, p_hi = px, s_hi = s;
    }
  };

  double seed = hint;
  if (!(seed > lo && seed < hi)) {
    seed = std::isfinite(p_hi) ? lo + (hi - lo) * (target - p_lo) / (p_hi - p_lo)
                               : 0.5 * (lo + hi);
  }
  double w = std::clamp(hint_width, 1e-10 * seed, 1e-2 * seed);
  for (int i = 0; i < opt.max_inner && hi - lo > 4.0 * w; ++i) {
    probe(seed - w);
    probe(seed + w);
    w *= 8.0;
  }
  for (int i = 0; i < opt.max_inner && hi - lo > opt.f_relative_tolerance * hi; ++i) {
    probe(0.5 * (lo + hi));
  }
  if (hi - lo > opt.f_relative_tolerance * hi) {
    throw SearchFailure(fmt::format("f search did not converge at a = {:g} um", to_um(a)));
  }
  const bool pick_lo = s_lo && std::abs(p_lo - target) <= std::abs(p_hi - target);
  if (pick_lo) return {lo, *s_lo};
  if (!s_hi) throw SearchFailure("f search ended on a trajectory that leaves the field region");
  return {hi, *s_hi};
}

}  // namespace

CalibrationResult calibrate(double target, const PhysParams& p, const FieldModel& base,
                            const SearchBox& box, const CalibrationOptions& opt) {
  if (!(box.a_min > 0.0 && box.a_min < box.a_max && box.f_min >= 0.0 && box.f_min < box.f_max)) {
    throw ConfigError("calibration search box is empty or negative");
  }
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw ConfigError("calibration target must be a non-negative length");
  }
  if (opt.n_steps < 10000 || opt.n_steps % 2 != 0) {
    throw ConfigError("calibration needs an even step count of at least 1e4");
  }
  CalibrationResult res;
  res.target = target;
  if (target == 0.0) {
    res.a = box.a_min;
    res.f = 0.0;
    res.converged = true;
    return res;
  }
  const double tol_final = opt.final_tolerance * p.delta;
  const double tol_peak = opt.peak_tolerance * p.delta;

  struct Point {
    double a;
    InnerSolution s;
    // Signed so that the sign change brackets the root regardless of which
    // way the up branch moves.
    double r() const { return std::copysign(1.0, s.sep.half) * s.sep.final; }
  };
  auto solve_at = [&](double a, double hint, double width) {
    FixedGeometry eval(base, a, p, opt);
    Point pt{a, solve_f(eval, target, hint, width, box, opt, a)};
    res.inner_iterations += eval.evaluations;
    return pt;
  };

  Point lo = solve_at(box.a_min, 0.0, 0.0);
  Point hi = solve_at(box.a_max, 0.0, 0.0);
  if (lo.r() * hi.r() > 0.0) {
    throw SearchFailure(fmt::format(
        "a range [{:g}, {:g}] um does not bracket dZ(T) = 0 for target {:g} um "
        "(dZ(T) = {:g} and {:g} um at the ends)",
        to_um(box.a_min), to_um(box.a_max), to_um(target), to_um(lo.s.sep.final),
        to_um(hi.s.sep.final)));
  }
  Point best = std::abs(lo.r()) < std::abs(hi.r()) ? lo : hi;
  auto done = [&](const Point& pt) {
    return std::abs(pt.s.sep.final) <= tol_final && std::abs(std::abs(pt.s.sep.half) - target) <= tol_peak;
  };
  while (!done(best) && res.outer_iterations < opt.max_outer) {
    ++res.outer_iterations;
    const double mid = 0.5 * (lo.a + hi.a);
    const double hint = 0.5 * (lo.s.f + hi.s.f);
    const Point m = solve_at(mid, hint, std::abs(hi.s.f - lo.s.f));
    if (std::abs(m.r()) < std::abs(best.r())) best = m;
    if ((m.r() < 0.0) == (lo.r() < 0.0)) {
      lo = m;
    } else {
      hi = m;
    }
  }
  res.a = best.a;
  res.f = best.s.f;
  res.dz_half = best.s.sep.half;
  res.dz_final = best.s.sep.final;
  res.converged = done(best);
  if (!res.converged) {
    throw SearchFailure(fmt::format(
        "calibration for {:g} um stopped after {} outer iterations with dZ(T) = {:.3e} um",
        to_um(target), res.outer_iterations, to_um(res.dz_final)));
  }
  return res;
}

}  // namespace sgi
