#include "sgi/units.hpp"

#include <string>

#include "sgi/errors.hpp"
#include "sgi/params.hpp"

namespace sgi {
namespace {

// CODATA 2018.
constexpr double kBohrRadiusMetres = 5.29177210903e-11;
constexpr double kAtomicTimeSeconds = 2.4188843265857e-17;
constexpr double kElectronMassesPerDalton = 1822.888486209;

}  // namespace

Unit parse_unit(std::string_view tag) {
  if (tag == "um" || tag == "micrometer" || tag == "μm") return Unit::micrometer;
  if (tag == "us" || tag == "microsecond" || tag == "μs") return Unit::microsecond;
  if (tag == "Da" || tag == "dalton") return Unit::dalton;
  if (tag == "m/s") return Unit::meter_per_second;
  if (tag == "au_B" || tag == "magnetic_au") return Unit::magnetic_au;
  if (tag == "mu_B" || tag == "bohr_magneton") return Unit::bohr_magneton;
  throw ConfigError("unknown unit tag '" + std::string(tag) + "'");
}

std::string_view unit_tag(Unit u) {
  switch (u) {
    case Unit::micrometer: return "um";
    case Unit::microsecond: return "us";
    case Unit::dalton: return "Da";
    case Unit::meter_per_second: return "m/s";
    case Unit::magnetic_au: return "au_B";
    case Unit::bohr_magneton: return "mu_B";
  }
  return "?";
}

double UnitSystem::scale(Unit u) const {
  switch (u) {
    case Unit::micrometer: return length_scale;
    case Unit::microsecond: return time_scale;
    case Unit::dalton: return mass_scale;
    case Unit::meter_per_second: return velocity_scale;
    case Unit::magnetic_au: return field_scale;
    case Unit::bohr_magneton: return moment_scale;
  }
  throw ConfigError("unit without a scale");
}

const UnitSystem& atomic_units() {
  static const UnitSystem units{
      1e-6 / kBohrRadiusMetres,
      1e-6 / kAtomicTimeSeconds,
      kElectronMassesPerDalton,
      1.0,
      kAtomicTimeSeconds / kBohrRadiusMetres,
      0.5,
  };
  return units;
}

PhysParams PhysParams::silver() {
  const UnitSystem& u = atomic_units();
  PhysParams p;
  p.mass = u.to_internal(107.8682, Unit::dalton);
  p.moment = u.to_internal(0.5, Unit::bohr_magneton);
  p.length = u.to_internal(25.0, Unit::micrometer);
  p.duration = u.to_internal(0.1, Unit::microsecond);
  p.delta = u.to_internal(0.01, Unit::micrometer);
  p.y_start = -0.5 * p.length;
  return p;
}

}  // namespace sgi
