#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sgi/calibration.hpp"
#include "sgi/field.hpp"
#include "sgi/params.hpp"

namespace sgi {

enum class Mode { simplified_1d, full_3d, sweep, calibrate, fieldmap };
Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

// Everything a run needs.  Lengths are stored internally (atomic units); the
// JSON form uses um / us / Da / Bohr magnetons.
struct ExperimentConfig {
  Mode mode = Mode::simplified_1d;
  PhysParams physics = PhysParams::silver();

  // Field.
  double alpha = 0.0;          // 1/length; 0.3 per um by default
  double profile_scale = 0.0;  // length
  std::optional<double> bias;  // default: 100 / |b0(0)|
  ChargeArrangement arrangement = ChargeArrangement::like;
  int quadrature_nodes = 256;
  std::optional<double> a;  // explicit geometry; otherwise taken from calibration.csv
  std::optional<double> f;

  // Targets in units of delta.
  double target = 5.0;
  std::vector<double> targets{2.0, 5.0, 10.0, 15.0, 20.0};

  // 1D grid.
  int nz_1d = 4096;
  double extent_1d = 96.0;  // delta
  long nt_1d = 4096;

  // 3D grid; empty means sized per run from the classical trajectory.
  std::optional<std::array<int, 3>> n_3d;
  std::optional<std::array<double, 3>> extent_3d;  // delta
  long nt_3d = 1024;
  double patch_radius = 6.0;  // delta
  // Auto-sizing: spacing resolves the peak classical momentum plus this many
  // 1/delta; extent covers the excursion plus this many delta per side.
  double k_margin = 6.0;
  double x_margin = 7.0;

  long observe_every = 64;
  CalibrationOptions calibration;
  SearchBox box = default_search_box();

  // Field map sampling: {min, max} in um per axis and point counts.
  std::array<std::array<double, 2>, 3> map_range{{{-0.5, 0.5}, {-12.5, 12.5}, {-0.5, 0.5}}};
  std::array<int, 3> map_points{1, 101, 21};

  std::string out_dir = "out";
  int workers = 1;
  long checkpoint_every = 0;
  std::string resume;

  FieldModel field_model(double a, double f) const;
  double resolved_bias() const;
};

ExperimentConfig default_config();

// Reads a JSON file over the defaults.  Unknown keys, bad types and bad values
// throw ConfigError.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = default_config());
ExperimentConfig config_from_json_text(const std::string& text,
                                       ExperimentConfig base = default_config());

// Full JSON snapshot of the resolved configuration.
std::string config_to_json(const ExperimentConfig& c);

// Checks ranges; throws ConfigError.
void validate(const ExperimentConfig& c);

// SGI_WORKERS when set, otherwise `fallback`.  A malformed value throws.
int workers_from_env(int fallback);

}  // namespace sgi
