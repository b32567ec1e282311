#pragma once

#include <Eigen/Core>
#include <vector>

#include "sgi/field.hpp"
#include "sgi/params.hpp"
#include "sgi/patch.hpp"
#include "sgi/propagator.hpp"

namespace sgi {

// Free evolution.
class ZeroSource : public PotentialSource {
 public:
  void sample(const SpinorField&, double, bool, PotentialSample& out) override {
    out.kind = PotentialSample::Kind::none;
    out.g.resize(0);
  }
};

// Static uniform field; `moment_field` is mu * B.
class UniformFieldSource : public PotentialSource {
 public:
  explicit UniformFieldSource(const Eigen::Vector3d& moment_field) : b_(moment_field) {}
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override;

 private:
  Eigen::Vector3d b_;
};

// Scalar test hook V = m w^2 (z - z0)^2 / 2 on both components.
class HarmonicSource : public PotentialSource {
 public:
  HarmonicSource(double mass, double omega, double z0 = 0.0)
      : mass_(mass), omega_(omega), z0_(z0) {}
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override;

 private:
  double mass_, omega_, z0_;
};

// Simplified one-dimensional Hamiltonian: V = -mu sigma_z Bz(0, y_lab(t), Z)
// on a 1D grid along z, with y_lab = y0 + v t.  The z-dependence of every
// quadrature node is tabulated once, so a sample is two matrix-vector
// products.
class AxialLineSource : public PotentialSource {
 public:
  AxialLineSource(const FieldModel& model, const PhysParams& p, const Grid& grid);
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override;

 private:
  FieldModel model_;
  PhysParams p_;
  Eigen::MatrixXd first_;   // grid points x nodes
  Eigen::MatrixXd second_;
};

// Full three-dimensional spinor potential from quadratic patches centred on
// the current spin-component centroids.  Each grid point uses the nearest
// centre.  The lab position of a frame point r is (x, y0 + v t + y, z).
class PatchSource : public PotentialSource {
 public:
  PatchSource(const FieldModel& model, const PhysParams& p, double radius);
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override;

  const std::vector<QuadraticFieldPatch>& last_patches() const { return patches_; }

 private:
  FieldModel model_;
  PhysParams p_;
  double radius_;
  std::vector<QuadraticFieldPatch> patches_;
};

// Exact field at every grid point (small grids; reference for patch tests).
class ExactFieldSource : public PotentialSource {
 public:
  ExactFieldSource(const FieldModel& model, const PhysParams& p) : model_(model), p_(p) {}
  void sample(const SpinorField& psi, double t, bool with_gradient, PotentialSample& out) override;

 private:
  FieldModel model_;
  PhysParams p_;
};

}  // namespace sgi
