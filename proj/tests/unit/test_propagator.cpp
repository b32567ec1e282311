#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sgi/errors.hpp"
#include "sgi/observables.hpp"
#include "sgi/profile.hpp"
#include "sgi/propagator.hpp"
#include "sgi/sources.hpp"
#include "sgi/spinor.hpp"
#include "sgi/units.hpp"

using namespace sgi;
using cd = std::complex<double>;

namespace {

const PhysParams P = PhysParams::silver();

// |<a|b>| over the grid, both components.
cd overlap(const SpinorField& a, const SpinorField& b) {
  const cd s = (a.up.conjugate() * b.up).sum() + (a.down.conjugate() * b.down).sum();
  return s * a.grid.cell_volume();
}

// Coherent state of V = m w^2 x^2 / 2 with x = z - z0, up to a global phase.
SpinorField coherent_state(const Grid& g, double m, double w, double z0, double q0, double t) {
  const double q = q0 * std::cos(w * t);
  const double p = -m * w * q0 * std::sin(w * t);
  SpinorField s(g);
  const double n = std::pow(m * w / std::numbers::pi, 0.25) / std::numbers::sqrt2;
  for (int i = 0; i < g.points(2); ++i) {
    const double x = g.coord(2, i) - z0;
    s.up[i] = n * std::exp(cd(-0.5 * m * w * (x - q) * (x - q), p * x));
  }
  s.down = s.up;
  return s;
}

// || a - e^{i chi} exact || with the global phase chi chosen optimally.
double phase_free_error(const SpinorField& a, const SpinorField& exact) {
  const cd ph = std::polar(1.0, std::arg(overlap(exact, a)));
  const double s = (a.up - ph * exact.up).abs2().sum() + (a.down - ph * exact.down).abs2().sum();
  return std::sqrt(s * a.grid.cell_volume());
}

double harmonic_error(long steps) {
  const double m = P.mass, d = P.delta;
  const double w = 1.0 / (m * d * d);  // ground-state width equals delta
  const double z0 = -3.0 * d;          // well centre; the packet sits 3 delta away
  const double T = 2.0 * 2.0 * std::numbers::pi / w;
  const Grid g = Grid::line(256, 32 * d);
  SpinorField s = make_gaussian_packet(g, P);
  HarmonicSource src(m, w, z0);
  SplitOperator op(g, m);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(T, steps);
  evolve(s, src, op, opt);
  return phase_free_error(s, coherent_state(g, m, w, z0, -z0, T));
}

// Scalar bump V0 exp(-(z_lab - c)^2 / (2 w^2)), sampled either on a static lab
// grid or on a frame moving with speed v from z_start.
class Bump : public PotentialSource {
 public:
  Bump(double v0, double c, double w, double z_start, double v)
      : v0_(v0), c_(c), w_(w), z_start_(z_start), v_(v) {}
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override {
    const Grid& g = psi.grid;
    out.kind = PotentialSample::Kind::scalar;
    out.scalar.resize(g.size());
    out.g.resize(with_gradient ? g.size() : 0);
    for (int i = 0; i < g.points(2); ++i) {
      const double x = g.coord(2, i) + z_start_ + v_ * t - c_;
      const double e = v0_ * std::exp(-0.5 * x * x / (w_ * w_));
      out.scalar[i] = e;
      if (with_gradient) out.g[i] = std::pow(-x / (w_ * w_) * e, 2);
    }
  }

 private:
  double v0_, c_, w_, z_start_, v_;
};

}  // namespace

TEST_CASE("free spreading follows the analytic width law") {
  const Grid g = Grid::line(1024, 48 * P.delta);
  SpinorField s = make_gaussian_packet(g, P);
  ZeroSource zero;
  SplitOperator op(g, P.mass);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(P.duration, 16);
  const EvolveResult r = evolve(s, zero, op, opt);
  const double ratio = r.series.back().width_up.z() / r.series.front().width_up.z();
  const double tau = P.duration / (P.mass * P.delta * P.delta);
  CHECK(ratio == doctest::Approx(std::sqrt(1.0 + tau * tau)).epsilon(1e-9));
  CHECK(std::abs(ratio - 1.16) / 1.16 < 5e-3);
  CHECK(r.series.back().coherence == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.series.back().spin.x() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.max_norm_drift <= 1e-12);
}

TEST_CASE("fourth-order convergence on the harmonic hook") {
  const double e1 = harmonic_error(32), e2 = harmonic_error(64), e3 = harmonic_error(128);
  const double e4 = harmonic_error(256);
  MESSAGE("errors " << e1 << " " << e2 << " " << e3 << " " << e4);
  CHECK(e2 / e3 >= 12.0);
  CHECK(e2 / e3 <= 20.0);
  CHECK(e3 / e4 >= 12.0);
  CHECK(e3 / e4 <= 20.0);
  CHECK(harmonic_error(2048) < 1e-8);
}

TEST_CASE("uniform field: Larmor rotation about the field axis") {
  const Grid g = Grid::line(64, 16 * P.delta);
  const Eigen::Vector3d n = Eigen::Vector3d(1.0, 1.0, 1.0).normalized();
  const double b = 3e-8;  // mu |B|
  UniformFieldSource src(b * n);
  SpinorField s = make_gaussian_packet(g, P);
  const Eigen::Vector3d s0 = spin_expectation(s);
  SplitOperator op(g, P.mass);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(P.duration, 8);
  evolve(s, src, op, opt);
  // H = -b n.sigma turns <sigma> about n by -2 b t (Rodrigues).
  const double th = -2.0 * b * P.duration;
  const Eigen::Vector3d expect =
      s0 * std::cos(th) + n.cross(s0) * std::sin(th) + n * n.dot(s0) * (1.0 - std::cos(th));
  CHECK((spin_expectation(s) - expect).norm() < 1e-10);
  CHECK(coherence(s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bias along z: closed-form angle") {
  const Grid g = Grid::line(64, 16 * P.delta);
  const double f = 1e-7, b0 = default_bias(0.3);
  UniformFieldSource src(Eigen::Vector3d(0.0, 0.0, P.moment * f * b0));
  SpinorField s = make_gaussian_packet(g, P);
  SplitOperator op(g, P.mass);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(P.duration, 4);
  evolve(s, src, op, opt);
  const double angle = 2.0 * P.moment * f * b0 * P.duration;
  const Eigen::Vector3d sp = spin_expectation(s);
  CHECK(sp.x() == doctest::Approx(std::cos(angle)).epsilon(1e-10));
  CHECK(sp.y() == doctest::Approx(-std::sin(angle)).epsilon(1e-10));
  CHECK(std::abs(sp.z()) < 1e-13);
}

TEST_CASE("step followed by its time reverse is the identity") {
  const double a = um(0.72), f = 2.15e-4;
  const FieldModel m(a, f, 0.3 / um(1.0), default_bias(0.3), um(1.0));
  const Grid g = Grid::line(1024, 48 * P.delta);
  AxialLineSource src(m, P, g);
  SpinorField s = make_gaussian_packet(g, P);
  s.time = 0.37 * P.duration;
  // Give the state some structure first.
  SplitOperator op(g, P.mass);
  for (int i = 0; i < 5; ++i) op.step(s, src, P.duration / 512);
  const SpinorField start = s;
  const double t = P.duration / 64;
  op.step(s, src, t);
  op.step(s, src, -t);
  CHECK((s.up - start.up).abs().maxCoeff() < 1e-10);
  CHECK((s.down - start.down).abs().maxCoeff() < 1e-10);
  CHECK(s.time == doctest::Approx(start.time));
}

TEST_CASE("per-step unitarity") {
  const FieldModel m(um(0.72), 2.15e-4, 0.3 / um(1.0), default_bias(0.3), um(1.0));
  const Grid g = Grid::line(1024, 48 * P.delta);
  AxialLineSource src(m, P, g);
  SpinorField s = make_gaussian_packet(g, P);
  SplitOperator op(g, P.mass);
  double prev = norm(s), worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    op.step(s, src, P.duration / 64);
    const double n = norm(s);
    worst = std::max(worst, std::abs(n - prev) / prev);
    prev = n;
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("gradient factor leaves the spin untouched") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const Grid g = Grid::line(128, 16 * P.delta);
  SpinorField s(g);
  for (Eigen::Index i = 0; i < s.up.size(); ++i) {
    s.up[i] = {nd(rng), nd(rng)};
    s.down[i] = {nd(rng), nd(rng)};
  }
  PotentialSample smp;
  smp.kind = PotentialSample::Kind::spin;
  smp.bx = Eigen::ArrayXd::Random(g.size()) * 1e-6;
  smp.by = Eigen::ArrayXd::Random(g.size()) * 1e-6;
  smp.bz = Eigen::ArrayXd::Random(g.size()) * 1e-6;
  smp.g = Eigen::ArrayXd::Random(g.size()).abs() * 1e-20;
  SpinorField with = s, without = s;
  potential_step(with, smp, 2.0 / 3.0, 1e7, true, P.mass);
  potential_step(without, smp, 2.0 / 3.0, 1e7, false, P.mass);
  const Eigen::Vector3d a = spin_expectation(with), b = spin_expectation(without);
  CHECK((a - b).norm() <= 1e-12 * b.norm());
  // And the factor really acted on the orbital part.
  CHECK((with.up - without.up).abs().maxCoeff() > 1e-6);
}

TEST_CASE("co-moving frame and static lab grid agree") {
  // One grid cell per half step keeps every pointwise factor on grid nodes.
  const double d = P.delta, h = d / 8.0, m = P.mass;
  const int n = 1024, steps = 64;
  const double v = 0.06 / m;                 // lab momentum 0.06 / a0, well inside the grid
  const double dt = 2.0 * h / v;
  const int shift = 2 * steps;               // cells travelled
  const double z_start = -0.5 * shift * h;   // lab position of the frame origin at t = 0
  const Grid g = Grid::line(n, n * h);
  const double v0 = 0.3 / (m * d * d), w = 4.0 * d;

  SpinorField frame = make_gaussian_packet(g, P);
  SpinorField lab(g);
  for (int i = 0; i < n; ++i) {
    const int j = i + shift / 2;  // frame index of lab node i
    const double x = g.coord(2, i);
    const cd boost = std::polar(1.0, m * v * (x - z_start));
    if (j >= 0 && j < n) {
      lab.up[i] = frame.up[j] * boost;
      lab.down[i] = frame.down[j] * boost;
    }
  }
  Bump moving(v0, 0.0, w, z_start, v), fixed(v0, 0.0, w, 0.0, 0.0);
  SplitOperator opf(g, m), opl(g, m);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(steps * dt, steps);
  opt.boundary_tolerance = 1.0;
  evolve(frame, moving, opf, opt);
  evolve(lab, fixed, opl, opt);

  const double T = steps * dt;
  double worst = 0.0, peak = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = i - shift / 2;  // lab node i + shift/2 pairs with frame node i
    if (j < 0 || j + shift >= n) continue;
    const int il = i + shift / 2;
    const double x = g.coord(2, il);
    const cd boost = std::polar(1.0, m * v * (x - z_start) - 0.5 * m * v * v * T);
    worst = std::max(worst, std::abs(lab.up[il] - frame.up[i] * boost));
    peak = std::max(peak, std::abs(frame.up[i]));
  }
  MESSAGE("frame/lab max amplitude difference " << worst << " (peak amplitude " << peak << ")");
  CHECK(peak > 0.01);
  CHECK(worst <= 1e-8);
}

TEST_CASE("evolve guards") {
  const Grid g = Grid::line(64, 8.5 * P.delta);
  SpinorField s = make_gaussian_packet(g, P);
  ZeroSource zero;
  SplitOperator op(g, P.mass);
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(P.duration, 8);
  // The packet spreads into the boundary band of this small grid.
  CHECK_THROWS_AS(evolve(s, zero, op, opt), NumericalFailure);
  CHECK_THROWS_AS(StepSchedule::seven_star(1.0, 0), ConfigError);
  SpinorField other = make_gaussian_packet(Grid::line(128, 16 * P.delta), P);
  CHECK_THROWS_AS(op.kinetic_step(other, 0.5, 1.0), GridMismatchError);
}
