#pragma once

#include <string>
#include <vector>

#include "sgi/calibration.hpp"
#include "sgi/config.hpp"
#include "sgi/results.hpp"

namespace sgi {

struct Geometry {
  double a;
  double f;
};

// Explicit (a, f) from the config, else the calibration.csv row for `target`
// (in delta) in the output directory.  Neither → ConfigError.
Geometry resolve_geometry(const ExperimentConfig& cfg, double target);

// Calibrates every target (in delta) independently; rows come back in input
// order.  Failures propagate.
std::vector<CalibrationResult> run_calibration(const ExperimentConfig& cfg,
                                               const std::vector<double>& targets);
std::string calibration_csv(const std::vector<CalibrationResult>& rows, double delta);
// Parses the CSV written above; rows as (target in delta, a, f).
std::vector<std::array<double, 3>> read_calibration_csv(const std::string& path);

// Sizes a 3D grid for the geometry from an adiabatic classical trajectory.
Grid auto_grid_3d(const ExperimentConfig& cfg, const FieldModel& model);

// When cfg.checkpoint_every > 0, checkpoint.bin in the output directory is
// rewritten at that cadence.  When cfg.resume is set the run continues from
// that file; it must belong to the same run.
ResultRecord run_simplified_1d(const ExperimentConfig& cfg);
ResultRecord run_full_3d(const ExperimentConfig& cfg);

// One full-3D run per cfg.targets entry.  Entries that fail are kept with
// their error text and the sweep continues.  Each run is written to
// <out>/dz_<target>/ and the curve to <out>/sweep.csv.
std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg);
std::string sweep_csv(const std::vector<ResultRecord>& rows);

// x_um, y_um, z_um, Bx, By, Bz over the configured sampling box.
std::string fieldmap_csv(const ExperimentConfig& cfg, const FieldModel& model);

}  // namespace sgi
