#include "sgi/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sgi/bessel.hpp"
#include "sgi/errors.hpp"
#include "sgi/profile.hpp"

namespace sgi {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

FieldModel::FieldModel(double a, double f, double alpha, double bias, double profile_scale,
                       ChargeArrangement arrangement, QuadratureSpec quadrature)
    : a_(a), f_(f), alpha_(alpha), bias_(bias), scale_(profile_scale),
      arrangement_(arrangement), quadrature_(quadrature) {
  if (!(a > 0.0)) throw ConfigError("field model: a must be positive");
  if (!(f >= 0.0)) throw ConfigError("field model: f must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("field model: alpha must be positive");
  if (!(bias >= 0.0)) throw ConfigError("field model: B0 must be non-negative");
  if (quadrature_.k_max <= 0.0) quadrature_.k_max = 12.0 * alpha;
  if (quadrature_.nodes < 1) throw ConfigError("field model: quadrature needs nodes");

  const GaussLegendre rule = gauss_legendre(quadrature_.nodes);
  auto kernel = std::make_shared<Kernel>();
  kernel->k.resize(quadrature_.nodes);
  kernel->w.resize(quadrature_.nodes);
  const double half = 0.5 * quadrature_.k_max;
  for (int i = 0; i < quadrature_.nodes; ++i) {
    const double k = half * (rule.nodes[i] + 1.0);
    const double k1 = bessel_k1(k * a);
    if (k1 == 0.0) throw DomainError("field model: K1(k a) underflows; a too large for k_max");
    kernel->k[i] = k;
    kernel->w[i] = half * rule.weights[i] * scale_ * b0_spectrum(k, alpha) /
                   (std::numbers::pi * k * k1);
  }
  kernel_ = std::move(kernel);
}

FieldModel FieldModel::with(double a, double f) const {
  return FieldModel(a, f, alpha_, bias_, scale_, arrangement_, quadrature_);
}

namespace {

// Radial derivatives of F(s) = K0(k s) up to third order.
struct Radial {
  double f0, f1, f2, f3;
};

Radial radial(double k, double s) {
  const double x = k * s;
  const double k0 = bessel_k0(x);
  const double k1 = bessel_k1(x);
  return {k0, -k * k1, k * k * (k0 + k1 / x), -k * k * k * (k1 + k0 / x + 2.0 * k1 / (x * x))};
}

// Below this value of k*s the K0 difference of the opposite pair is replaced
// by its logarithmic limit.
constexpr double kSmallArgument = 1e-6;

int plane_index(int axis) { return axis == 0 ? 0 : 1; }

}  // namespace

PotentialJet potential_jet(const Vector3d& r, const FieldModel& model, int order) {
  const double a = model.a();
  const double s_lo = distance_minus_line(r, a);
  const double s_hi = distance_plus_line(r, a);
  if (s_lo == 0.0 || s_hi == 0.0) {
    throw SingularityError("field evaluated on a charge line at z = " + std::to_string(r.z()));
  }
  struct Line {
    double s, q;
    Vector2d u;
  };
  const Line lines[2] = {
      {s_lo, 1.0, Vector2d(r.x(), r.z() + a) / s_lo},
      {s_hi, model.second_charge(), Vector2d(r.x(), r.z() - a) / s_hi},
  };
  const bool opposite = model.arrangement() == ChargeArrangement::opposite;
  const double s_max = std::max(s_lo, s_hi);

  const auto& ker = model.kernel();
  PotentialJet jet;
  double s0 = 0.0;
  Vector2d s1;
  Matrix2d s2;
  Matrix2d s3[2];
  for (Eigen::Index i = 0; i < ker.k.size(); ++i) {
    const double k = ker.k[i];
    const double w = ker.w[i];
    s0 = 0.0;
    s1.setZero();
    s2.setZero();
    s3[0].setZero();
    s3[1].setZero();
    for (const Line& ln : lines) {
      const Radial d = radial(k, ln.s);
      s0 += ln.q * d.f0;
      s1 += ln.q * d.f1 * ln.u;
      if (order >= 2) {
        const Matrix2d uu = ln.u * ln.u.transpose();
        s2 += ln.q * (d.f2 * uu + d.f1 / ln.s * (Matrix2d::Identity() - uu));
      }
      if (order >= 3) {
        const double bp = d.f2 / ln.s - d.f1 / (ln.s * ln.s);
        for (int c = 0; c < 2; ++c)
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) {
              const double uuu = ln.u[p] * ln.u[q] * ln.u[c];
              const double mix = (p == q) * ln.u[c] + (p == c) * ln.u[q] + (q == c) * ln.u[p];
              s3[c](p, q) += ln.q * (d.f3 * uuu + bp * (mix - 3.0 * uuu));
            }
      }
    }
    if (opposite && k * s_max < kSmallArgument) s0 = std::log(s_hi / s_lo);

    const double cy = std::cos(k * r.y());
    const double sy = std::sin(k * r.y());
    // n-th y-derivative of cos(k y).
    const double ydiv[4] = {cy, -k * sy, -k * k * cy, k * k * k * sy};

    jet.value += w * cy * s0;
    jet.grad += w * Vector3d(cy * s1[0], ydiv[1] * s0, cy * s1[1]);
    if (order >= 2) {
      for (int p = 0; p < 3; ++p)
        for (int q = p; q < 3; ++q) {
          const int ny = (p == 1) + (q == 1);
          double v;
          if (ny == 0) v = s2(plane_index(p), plane_index(q));
          else if (ny == 1) v = s1[plane_index(p == 1 ? q : p)];
          else v = s0;
          jet.hess(p, q) += w * ydiv[ny] * v;
        }
    }
    if (order >= 3) {
      for (int c = 0; c < 3; ++c)
        for (int p = 0; p < 3; ++p)
          for (int q = p; q < 3; ++q) {
            const int idx[3] = {p, q, c};
            int ny = 0;
            int rest[3];
            int nr = 0;
            for (int m : idx) {
              if (m == 1) ++ny;
              else rest[nr++] = plane_index(m);
            }
            double v;
            switch (nr) {
              case 3: v = s3[rest[2]](rest[0], rest[1]); break;
              case 2: v = s2(rest[0], rest[1]); break;
              case 1: v = s1[rest[0]]; break;
              default: v = s0; break;
            }
            jet.third[c](p, q) += w * ydiv[ny] * v;
          }
    }
  }
  if (order >= 2) jet.hess = jet.hess.selfadjointView<Eigen::Upper>();
  if (order >= 3)
    for (auto& t : jet.third) t = Matrix3d(t.selfadjointView<Eigen::Upper>());
  return jet;
}

double scalar_potential(const Vector3d& r, const FieldModel& model) {
  return potential_jet(r, model, 0).value;
}

Vector3d field_at(const Vector3d& r, const FieldModel& model) {
  const PotentialJet jet = potential_jet(r, model, 1);
  return model.f() * (Vector3d(0.0, 0.0, model.bias()) - jet.grad);
}

FieldDerivatives field_derivatives(const Vector3d& r, const FieldModel& model) {
  const PotentialJet jet = potential_jet(r, model, 3);
  const double f = model.f();
  FieldDerivatives out;
  out.value = f * (Vector3d(0.0, 0.0, model.bias()) - jet.grad);
  out.jacobian = -f * jet.hess;
  for (int k = 0; k < 3; ++k) out.hessian[k] = -f * jet.third[k];
  return out;
}

FieldDerivatives field_and_jacobian(const Vector3d& r, const FieldModel& model) {
  const PotentialJet jet = potential_jet(r, model, 2);
  const double f = model.f();
  FieldDerivatives out;
  out.value = f * (Vector3d(0.0, 0.0, model.bias()) - jet.grad);
  out.jacobian = -f * jet.hess;
  for (auto& h : out.hessian) h.setZero();
  return out;
}

double laplace_residual(const Vector3d& r, const FieldModel& model, double h) {
  // Fourth-order five-point stencil per axis.
  const double centre = scalar_potential(r, model);
  double lap = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    Vector3d e = Vector3d::Zero();
    e[axis] = h;
    lap += -scalar_potential(r + 2.0 * e, model) + 16.0 * scalar_potential(r + e, model) -
           30.0 * centre + 16.0 * scalar_potential(r - e, model) -
           scalar_potential(r - 2.0 * e, model);
  }
  lap /= 12.0 * h * h;
  const double gnorm = potential_jet(r, model, 1).grad.norm();
  if (gnorm == 0.0) return std::abs(lap);
  return std::abs(lap) * model.a() / gnorm;
}

}  // namespace sgi
