#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

namespace sgi {

// Signs of the two line charges at z = -a and z = +a.
//   opposite: (+1, -1), potential odd in z, on-axis Bz = f (B0 + 2 b0(y)).
//   like:     (+1, +1), potential even in z, Bz(0,y,0) = f B0 with a z-gradient.
enum class ChargeArrangement { opposite, like };

struct QuadratureSpec {
  double k_max = 0.0;
  int nodes = 256;

  static QuadratureSpec standard(double alpha) { return {12.0 * alpha, 256}; }
};

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

class FieldModel {
 public:
  struct Kernel {
    Eigen::ArrayXd k;  // quadrature wavenumbers
    Eigen::ArrayXd w;  // weight * l * spectrum(k) / (pi k K1(k a))
  };

  FieldModel(double a, double f, double alpha, double bias, double profile_scale,
             ChargeArrangement arrangement = ChargeArrangement::like,
             QuadratureSpec quadrature = {});

  double a() const { return a_; }
  double f() const { return f_; }
  double alpha() const { return alpha_; }
  double bias() const { return bias_; }
  double profile_scale() const { return scale_; }
  ChargeArrangement arrangement() const { return arrangement_; }
  const QuadratureSpec& quadrature() const { return quadrature_; }
  double second_charge() const { return arrangement_ == ChargeArrangement::like ? 1.0 : -1.0; }
  const Kernel& kernel() const { return *kernel_; }

  FieldModel with(double a, double f) const;

 private:
  double a_, f_, alpha_, bias_, scale_;
  ChargeArrangement arrangement_;
  QuadratureSpec quadrature_;
  std::shared_ptr<const Kernel> kernel_;
};

// phi and its derivatives up to third order at one point.  third[k](i, j) is
// d_i d_j d_k phi.
struct PotentialJet {
  double value = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
  std::array<Eigen::Matrix3d, 3> third{Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero(),
                                       Eigen::Matrix3d::Zero()};
};

PotentialJet potential_jet(const Eigen::Vector3d& r, const FieldModel& model, int order);

double scalar_potential(const Eigen::Vector3d& r, const FieldModel& model);
Eigen::Vector3d field_at(const Eigen::Vector3d& r, const FieldModel& model);

struct FieldDerivatives {
  Eigen::Vector3d value;
  Eigen::Matrix3d jacobian;  // (i, j) = d_i B_j
  std::array<Eigen::Matrix3d, 3> hessian;  // [k](i, j) = d_i d_j B_k
};

FieldDerivatives field_derivatives(const Eigen::Vector3d& r, const FieldModel& model);

// Value and Jacobian only (hessian left zero); cheaper than field_derivatives.
FieldDerivatives field_and_jacobian(const Eigen::Vector3d& r, const FieldModel& model);

// Finite-difference Laplacian of phi (fourth order), normalized by |grad phi| / a.
double laplace_residual(const Eigen::Vector3d& r, const FieldModel& model, double h);

// Distances to the lines at z = -a and z = +a.
inline double distance_minus_line(const Eigen::Vector3d& r, double a) {
  return std::hypot(r.x(), r.z() + a);
}
inline double distance_plus_line(const Eigen::Vector3d& r, double a) {
  return std::hypot(r.x(), r.z() - a);
}

}  // namespace sgi
