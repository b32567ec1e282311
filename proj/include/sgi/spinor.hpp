#pragma once

#include <Eigen/Core>

#include "sgi/grid.hpp"
#include "sgi/params.hpp"

namespace sgi {

struct SpinorField {
  Grid grid;
  Eigen::ArrayXcd up;
  Eigen::ArrayXcd down;
  double time = 0.0;

  SpinorField() = default;
  explicit SpinorField(const Grid& g)
      : grid(g), up(Eigen::ArrayXcd::Zero(g.size())), down(Eigen::ArrayXcd::Zero(g.size())) {}
};

// Unnormalized gaussian exp(-r^2 / (2 delta^2)) over the active axes, centred
// on the frame origin.
Eigen::ArrayXd sample_gaussian(const Grid& grid, double delta);

// Analytic unit-norm amplitude pi^{-d/4} delta^{-d/2} exp(-r^2/(2 delta^2)).
double gaussian_amplitude(double r2, double delta, int dims);

// psi(r) (|up> + |down>)/sqrt(2), normalized on the grid.
SpinorField make_gaussian_packet(const Grid& grid, const PhysParams& p);

double norm(const SpinorField& field);

}  // namespace sgi
