#pragma once

#include <Eigen/Core>
#include <complex>
#include <utility>

#include "sgi/spinor.hpp"

namespace sgi {

struct ObservableRecord {
  double time = 0.0;
  double norm = 0.0;
  Eigen::Vector3d spin = Eigen::Vector3d::Zero();
  double coherence = 0.0;
  Eigen::Vector3d centroid_up = Eigen::Vector3d::Zero();
  Eigen::Vector3d centroid_down = Eigen::Vector3d::Zero();
  double dz = 0.0;
  double dy = 0.0;
  Eigen::Vector3d width_up = Eigen::Vector3d::Zero();
  Eigen::Vector3d width_down = Eigen::Vector3d::Zero();
};

// Single pass over the field.  Centroids and widths of a component with
// (relative) weight below 1e-12 are reported as NaN.
ObservableRecord observe(const SpinorField& field);

Eigen::Vector3d spin_expectation(const SpinorField& field);

// C = <sigma>.<sigma>.  Cross-checks against 2 tr(M M^dagger) - 1 with
// M = (1 + <sigma>.sigma)/2 and throws NumericalFailure on disagreement.
double coherence(const SpinorField& field);

// rho_ab = int psi_a psi_b^* / int psi^dagger psi, computed directly from the
// amplitudes.
Eigen::Matrix2cd reduced_density_matrix(const SpinorField& field);
// 2 tr(rho rho^dagger) - 1.
double purity(const Eigen::Matrix2cd& rho);
// M = (1 + s.sigma)/2.
Eigen::Matrix2cd statistical_operator(const Eigen::Vector3d& spin);

// (dZ, dY) between the spin-component centroids.
std::pair<double, double> separations(const SpinorField& field);

// Probability-weighted centroids of |up|^2 and |down|^2 in frame coordinates,
// with each component's weight.
struct ComponentCentroids {
  Eigen::Vector3d up, down;
  double weight_up, weight_down;
};
ComponentCentroids component_centroids(const SpinorField& field);

// Probability within `margin` grid points of any boundary of an active axis.
double boundary_probability(const SpinorField& field, int margin);

}  // namespace sgi
