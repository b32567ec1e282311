#include "sgi/timing.hpp"

namespace sgi {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::transforms: return "spectral transforms";
    case Phase::potential: return "potential propagators";
    case Phase::observables: return "observables";
    case Phase::momentum: return "momentum propagators";
  }
  return "?";
}

double PhaseTimer::total() const {
  double t = 0.0;
  for (double s : seconds_) t += s;
  return t;
}

void PhaseTimer::merge(const PhaseTimer& other) {
  for (int i = 0; i < 4; ++i) seconds_[i] += other.seconds_[i];
}

}  // namespace sgi
