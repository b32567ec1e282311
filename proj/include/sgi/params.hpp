#pragma once

#include "sgi/units.hpp"

namespace sgi {

// Particle and apparatus parameters, internal units.
struct PhysParams {
  double mass;      // electron masses
  double moment;    // magnetic moment, atomic units
  double length;    // apparatus length L
  double duration;  // traversal time T
  double delta;     // packet width
  double y_start;   // beam entry point, -L/2 by default

  // Beam speed is derived so that v_y == L/T holds exactly.
  double speed() const { return length / duration; }

  // Silver atom through a 25 um apparatus in 0.1 us.
  static PhysParams silver();
};

}  // namespace sgi
