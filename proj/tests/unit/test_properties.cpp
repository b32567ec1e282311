#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sgi/config.hpp"
#include "sgi/experiment.hpp"
#include "sgi/fft.hpp"
#include "sgi/field.hpp"
#include "sgi/observables.hpp"
#include "sgi/patch.hpp"
#include "sgi/profile.hpp"
#include "sgi/propagator.hpp"
#include "sgi/sources.hpp"
#include "sgi/units.hpp"

using namespace sgi;
using Eigen::Vector3d;
using cd = std::complex<double>;

namespace {

const PhysParams P = PhysParams::silver();

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(unsigned long seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }
};

FieldModel random_model(Draw& d) {
  const double alpha_um = d.uniform(0.15, 0.6);
  const auto arr = d.uniform(0, 1) < 0.5 ? ChargeArrangement::like : ChargeArrangement::opposite;
  return FieldModel(um(d.uniform(0.4, 3.0)), d.uniform(1e-5, 0.05), alpha_um / um(1.0),
                    default_bias(alpha_um), um(1.0), arr);
}

Vector3d random_interior(Draw& d, double a) {
  return Vector3d(0.5 * a * d.uniform(-1, 1), um(d.uniform(-12.5, 12.5)), 0.5 * a * d.uniform(-1, 1));
}

Vector3d position(const Grid& g, Eigen::Index i) {
  const int nz = g.points(2), ny = g.points(1);
  const int iz = int(i % nz), iy = int((i / nz) % ny), ix = int(i / (nz * ny));
  return Vector3d(g.coord(0, ix), g.coord(1, iy), g.coord(2, iz));
}

// Smooth random spinor: a gaussian envelope times random low-order complex
// polynomials per component, normalized.
SpinorField random_state(Draw& d, const Grid& g) {
  SpinorField s(g);
  const Eigen::ArrayXd env = sample_gaussian(g, P.delta);
  cd cu[3], cdn[3];
  for (int k = 0; k < 3; ++k) {
    cu[k] = {d.normal(), d.normal()};
    cdn[k] = {d.normal(), d.normal()};
  }
  const Vector3d shift(d.uniform(-1, 1), d.uniform(-1, 1), d.uniform(-1, 1));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Vector3d r = position(g, i) / P.delta;
    const double q = r.dot(shift);
    s.up[i] = env[i] * (cu[0] + cu[1] * q + cu[2] * q * q);
    s.down[i] = env[i] * (cdn[0] + cdn[1] * r.z() + cdn[2] * r.x() * r.y());
  }
  const double n = norm(s);
  s.up /= n;
  s.down /= n;
  return s;
}

Grid small_box() { return Grid::box({8, 16, 16}, {10 * P.delta, 12 * P.delta, 12 * P.delta}); }

double max_diff(const SpinorField& a, const SpinorField& b) {
  return std::max((a.up - b.up).abs().maxCoeff(), (a.down - b.down).abs().maxCoeff());
}

}  // namespace

TEST_CASE("random models satisfy the static field equations") {
  Draw d(101);
  for (int m = 0; m < 12; ++m) {
    const FieldModel model = random_model(d);
    CAPTURE(to_um(model.a()));
    CAPTURE(model.f());
    for (int i = 0; i < 8; ++i) {
      const Vector3d r = random_interior(d, model.a());
      CHECK(laplace_residual(r, model, 1e-2 * model.a()) <= 1e-6);
      const FieldDerivatives fd = field_derivatives(r, model);
      const double s = fd.jacobian.norm();
      CHECK((fd.jacobian - fd.jacobian.transpose()).norm() <= 1e-8 * s);
      CHECK(std::abs(fd.jacobian.trace()) <= 1e-8 * s);
      CHECK((fd.value - field_at(r, model)).norm() <= 1e-13 * fd.value.norm());
    }
  }
}

TEST_CASE("a patch reproduces the field and its Jacobian at its centre") {
  Draw d(202);
  for (int m = 0; m < 10; ++m) {
    const FieldModel model = random_model(d);
    const Vector3d c = random_interior(d, model.a());
    const QuadraticFieldPatch p = make_patch(c, model, 0.1 * model.a());
    const FieldDerivatives fd = field_derivatives(c, model);
    CHECK((p.eval(Vector3d::Zero()) - fd.value).norm() <= 1e-14 * fd.value.norm());
    CHECK((p.jacobian_at(Vector3d::Zero()) - fd.jacobian).norm() <= 1e-14 * fd.jacobian.norm());
    // The surrogate Jacobian stays curl- and divergence-free away from the centre.
    const Vector3d off(d.uniform(-1, 1), d.uniform(-1, 1), d.uniform(-1, 1));
    const Eigen::Matrix3d j = p.jacobian_at(0.05 * model.a() * off.normalized());
    CHECK((j - j.transpose()).norm() <= 1e-8 * j.norm());
    CHECK(std::abs(j.trace()) <= 1e-8 * j.norm());
  }
}

TEST_CASE("steps on random states are unitary and reversible") {
  Draw d(303);
  const Grid g = small_box();
  const FieldModel model(um(0.72), 2.15e-4, 0.3 / um(1.0), default_bias(0.3), um(1.0));
  for (int trial = 0; trial < 6; ++trial) {
    SpinorField s = random_state(d, g);
    s.time = d.uniform(0.0, 0.9) * P.duration;
    const SpinorField start = s;
    const double t = d.uniform(0.2, 1.0) * P.duration / 256;
    SplitOperator op(g, P.mass);
    UniformFieldSource uni(Vector3d(d.normal(), d.normal(), d.normal()) * 1e-9);
    PatchSource patch(model, P, 6 * P.delta);
    PotentialSource& src = trial % 2 ? static_cast<PotentialSource&>(uni) : patch;
    op.step(s, src, t);
    CHECK(std::abs(norm(s) - 1.0) <= 1e-12);
    op.invalidate_cache();
    op.step(s, src, -t);
    CAPTURE(trial);
    // Patch centres follow the state, so the reverse step sees surrogates
    // built around slightly different points.
    const double tol = trial % 2 ? 1e-10 : 1e-8;
    CHECK(max_diff(s, start) <= tol * start.up.abs().maxCoeff());
  }
}

TEST_CASE("observable identities on random states") {
  Draw d(404);
  const Grid g = small_box();
  for (int trial = 0; trial < 20; ++trial) {
    const SpinorField s = random_state(d, g);
    const Eigen::Matrix2cd rho = reduced_density_matrix(s);
    CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
    CHECK((rho - rho.adjoint()).norm() <= 1e-14);
    const double c = coherence(s);
    CHECK(c >= -1e-12);
    CHECK(c <= 1.0 + 1e-12);
    CHECK(std::abs(c - purity(rho)) <= 1e-12);
    CHECK(std::abs(purity(statistical_operator(spin_expectation(s))) - c) <= 1e-12);

    // A spin-independent phase pattern leaves the reduced state alone.
    SpinorField ph = s;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const cd e = std::polar(1.0, 3.0 * position(g, i).z() / P.delta + d.uniform(0, 6.28));
      ph.up[i] *= e;
      ph.down[i] *= e;
    }
    CHECK((reduced_density_matrix(ph) - rho).norm() <= 1e-12);

    // A uniform spin rotation keeps the length of the spin vector.
    PotentialSample u;
    u.kind = PotentialSample::Kind::spin;
    const Vector3d b(d.normal(), d.normal(), d.normal());
    u.bx = Eigen::ArrayXd::Constant(g.size(), b.x());
    u.by = Eigen::ArrayXd::Constant(g.size(), b.y());
    u.bz = Eigen::ArrayXd::Constant(g.size(), b.z());
    SpinorField rot = s;
    potential_step(rot, u, 1.0, d.uniform(0.1, 2.0), false, P.mass);
    CHECK(std::abs(coherence(rot) - c) <= 1e-12);
  }
}

TEST_CASE("results do not depend on the worker count") {
  ExperimentConfig c = default_config();
  c.a = um(0.385378);
  c.f = 2.4506e-5;
  c.target = 1.0;
  c.n_3d = std::array<int, 3>{32, 32, 64};
  c.extent_3d = std::array<double, 3>{14.0, 14.0, 15.0};
  c.nt_3d = 32;
  c.observe_every = 8;
  c.workers = 1;
  const ResultRecord one = run_full_3d(c);
  c.workers = 3;
  const ResultRecord many = run_full_3d(c);
  set_worker_count(1);
  REQUIRE(one.series.size() == many.series.size());
  for (std::size_t i = 0; i < one.series.size(); ++i) {
    CHECK(std::abs(one.series[i].coherence - many.series[i].coherence) <= 1e-10);
    CHECK(std::abs(one.series[i].dz - many.series[i].dz) <= 1e-10 * P.delta);
  }
}

TEST_CASE("config snapshots round-trip for random settings") {
  Draw d(505);
  for (int trial = 0; trial < 10; ++trial) {
    ExperimentConfig c = default_config();
    c.target = d.uniform(0.5, 30);
    c.nz_1d = 1 << int(d.uniform(8, 13));
    c.extent_1d = d.uniform(20, 200);
    c.observe_every = long(d.uniform(1, 200));
    c.alpha = d.uniform(0.1, 0.9) / um(1.0);
    c.a = um(d.uniform(0.3, 4));
    c.f = d.uniform(0, 0.05);
    c.arrangement = trial % 2 ? ChargeArrangement::like : ChargeArrangement::opposite;
    const std::string j = config_to_json(c);
    const ExperimentConfig back = config_from_json_text(j);
    CHECK(config_to_json(back) == j);
    CHECK(*back.a == doctest::Approx(*c.a).epsilon(1e-15));
    CHECK(back.f == c.f);
  }
}
