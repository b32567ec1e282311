#pragma once

#include <string_view>

namespace sgi {

enum class Unit {
  micrometer,
  microsecond,
  dalton,
  meter_per_second,
  magnetic_au,
  bohr_magneton,
};

// Accepts "um", "us", "Da", "m/s", "au_B", "mu_B" (and a few spelled-out forms).
Unit parse_unit(std::string_view tag);
std::string_view unit_tag(Unit u);

// Scale factors from the I/O units into Hartree atomic units (hbar = m_e = 1).
struct UnitSystem {
  double length_scale;    // bohr per micrometre
  double time_scale;      // atomic time units per microsecond
  double mass_scale;      // electron masses per dalton
  double field_scale;     // internal field units per magnetic a.u.
  double velocity_scale;  // atomic velocity units per m/s
  double moment_scale;    // internal moment units per Bohr magneton

  double scale(Unit u) const;
  double to_internal(double value, Unit u) const { return value * scale(u); }
  double from_internal(double value, Unit u) const { return value / scale(u); }
};

const UnitSystem& atomic_units();

// Convenience shorthands used throughout.
inline double um(double v) { return atomic_units().to_internal(v, Unit::micrometer); }
inline double us(double v) { return atomic_units().to_internal(v, Unit::microsecond); }
inline double to_um(double v) { return atomic_units().from_internal(v, Unit::micrometer); }
inline double to_us(double v) { return atomic_units().from_internal(v, Unit::microsecond); }

}  // namespace sgi
