#include "sgi/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "sgi/checkpoint.hpp"
#include "sgi/errors.hpp"
#include "sgi/fft.hpp"
#include "sgi/propagator.hpp"
#include "sgi/sources.hpp"
#include "sgi/trajectory.hpp"
#include "sgi/units.hpp"

namespace sgi {

namespace fs = std::filesystem;

std::string calibration_csv(const std::vector<CalibrationResult>& rows, double delta) {
  std::string out = "target_dz_over_delta,a_um,f,dz_half_over_delta,dz_final_over_delta,outer_iterations,inner_iterations\n";
  for (const CalibrationResult& r : rows) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", r.target / delta,
                       to_um(r.a), r.f, r.dz_half / delta, r.dz_final / delta, r.outer_iterations,
                       r.inner_iterations);
  }
  return out;
}

std::vector<std::array<double, 3>> read_calibration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read calibration table " + path);
  std::vector<std::array<double, 3>> rows;
  std::string line;
  std::getline(in, line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::array<double, 3> row;
    std::string cell;
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ss, cell, ',')) throw ConfigError(fmt::format("{}:{}: short row", path, lineno));
      try {
        row[i] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}:{}: bad number '{}'", path, lineno, cell));
      }
    }
    row[1] = um(row[1]);
    rows.push_back(row);
  }
  return rows;
}

Geometry resolve_geometry(const ExperimentConfig& cfg, double target) {
  if (cfg.a && cfg.f) return {*cfg.a, *cfg.f};
  if (cfg.a || cfg.f) throw ConfigError("field.a_um and field.f must be given together");
  const fs::path table = fs::path(cfg.out_dir) / "calibration.csv";
  if (!fs::exists(table)) {
    throw ConfigError(fmt::format(
        "no (a, f) for target {} delta: give field.a_um and field.f, or run `calibrate` into {}",
        target, cfg.out_dir));
  }
  for (const auto& row : read_calibration_csv(table.string())) {
    if (std::abs(row[0] - target) <= 1e-9 * std::max(1.0, target)) return {row[1], row[2]};
  }
  throw ConfigError(fmt::format("{} has no row for target {} delta", table.string(), target));
}

std::vector<CalibrationResult> run_calibration(const ExperimentConfig& cfg,
                                               const std::vector<double>& targets) {
  const FieldModel base = cfg.field_model(cfg.box.a_min, 0.0);
  std::vector<CalibrationResult> out(targets.size());
  std::vector<std::string> errors(targets.size());
  std::vector<bool> numerical(targets.size(), false);
  // Targets are independent; each calibration is serial and deterministic.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < targets.size(); ++i) {
    try {
      out[i] = calibrate(targets[i] * cfg.physics.delta, cfg.physics, base, cfg.box, cfg.calibration);
    } catch (const NumericalFailure& e) {
      errors[i] = e.what();
      numerical[i] = true;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (errors[i].empty()) continue;
    const std::string msg = fmt::format("calibration for {} delta failed: {}", targets[i], errors[i]);
    if (numerical[i]) throw NumericalFailure(msg);
    throw ConfigError(msg);
  }
  return out;
}

namespace {

std::size_t next_pow2(double x) {
  std::size_t n = 2;
  while (double(n) < x) n *= 2;
  return n;
}

std::string run_identity(const std::string& kind, const ExperimentConfig& cfg, const Geometry& g,
                         const Grid& grid, long steps) {
  nlohmann::json j = {
      {"kind", kind},
      {"target", cfg.target},
      {"a", g.a},
      {"f", g.f},
      {"steps", steps},
      {"observe_every", cfg.observe_every},
      {"checkpoint_every", cfg.checkpoint_every},
      {"grid", {grid.points(0), grid.points(1), grid.points(2)}},
      {"extent", {grid.extent(0), grid.extent(1), grid.extent(2)}},
  };
  return j.dump();
}

ResultRecord run_common(const std::string& kind, const ExperimentConfig& cfg, const Geometry& geo,
                        const Grid& grid, long steps, PotentialSource& source) {
  const auto wall0 = std::chrono::steady_clock::now();
  set_worker_count(cfg.workers);
  ResultRecord rec;
  rec.label = kind;
  rec.config_snapshot = config_to_json(cfg);
  rec.delta = cfg.physics.delta;
  rec.target = cfg.target;
  rec.a = geo.a;
  rec.f = geo.f;
  rec.grid = grid;
  rec.steps = steps;

  const std::string identity = run_identity(kind, cfg, geo, grid, steps);
  SpinorField field;
  EvolveOptions opt;
  opt.schedule = StepSchedule::seven_star(cfg.physics.duration, steps);
  opt.observe_every = cfg.observe_every;
  opt.checkpoint_every = cfg.checkpoint_every;
  std::vector<ObservableRecord> prefix;
  if (!cfg.resume.empty()) {
    Restored r = read_checkpoint(cfg.resume, grid);
    if (r.meta.run != identity) {
      throw ConfigError(fmt::format("checkpoint {} belongs to a different run ({})", cfg.resume, r.meta.run));
    }
    field = std::move(r.field);
    opt.start_step = r.meta.step;
    prefix = std::move(r.meta.series);
  } else {
    field = make_gaussian_packet(grid, cfg.physics);
  }

  SplitOperator op(grid, cfg.physics.mass);
  std::vector<ObservableRecord> collected;
  const std::string ckpt = (fs::path(cfg.out_dir) / "checkpoint.bin").string();
  if (cfg.checkpoint_every > 0) {
    opt.on_checkpoint = [&](const SpinorField& f, long step) {
      CheckpointMeta meta;
      meta.step = step;
      meta.run = identity;
      // The restart record of a resumed run duplicates the last prefix entry.
      meta.series = prefix;
      const std::size_t skip = prefix.empty() ? 0 : 1;
      meta.series.insert(meta.series.end(), collected.begin() + long(std::min(skip, collected.size())),
                         collected.end());
      write_checkpoint(ckpt, f, meta);
    };
  }
  opt.on_record = [&](const ObservableRecord& r) { collected.push_back(r); };
  const EvolveResult res = evolve(field, source, op, opt);
  // On resume the restart step was already recorded before the checkpoint.
  std::vector<ObservableRecord> series = prefix;
  const std::size_t skip = opt.start_step > 0 ? 1 : 0;
  series.insert(series.end(), res.series.begin() + long(std::min(skip, res.series.size())), res.series.end());
  rec.series = std::move(series);
  rec.max_norm_drift = res.max_norm_drift;
  finalize(rec);
  rec.timing = op.timer();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rec;
}

}  // namespace

ResultRecord run_simplified_1d(const ExperimentConfig& cfg) {
  const Geometry geo = resolve_geometry(cfg, cfg.target);
  const FieldModel model = cfg.field_model(geo.a, geo.f);
  const Grid grid = Grid::line(cfg.nz_1d, cfg.extent_1d * cfg.physics.delta);
  AxialLineSource source(model, cfg.physics, grid);
  return run_common("run-1d", cfg, geo, grid, cfg.nt_1d, source);
}

Grid auto_grid_3d(const ExperimentConfig& cfg, const FieldModel& model) {
  const PhysParams& p = cfg.physics;
  double kz = 0.0, ky = 0.0, zmax = 0.0, ymax = 0.0;
  if (model.f() != 0.0) {
    TrajectoryOptions t;
    t.n_steps = 20000;
    t.model = ForceModel::adiabatic;
    t.record_every = t.n_steps;
    for (int branch : {1, -1}) {
      const Trajectory tr = classical_trajectory(branch, model, p, t);
      kz = std::max(kz, tr.max_transverse_momentum_z);
      ky = std::max(ky, tr.max_transverse_momentum_y);
      zmax = std::max(zmax, tr.max_abs_z);
      ymax = std::max(ymax, tr.max_abs_y_offset);
    }
  }
  const double d = p.delta;
  const double kpad = cfg.k_margin / d;
  const double xpad = cfg.x_margin * d;
  const std::array<double, 3> k{0.0, ky, kz};
  const std::array<double, 3> excursion{0.0, ymax, zmax};
  std::array<int, 3> n;
  std::array<double, 3> ext;
  for (int a = 0; a < 3; ++a) {
    ext[a] = 2.0 * (excursion[a] + xpad);
    const double h = std::numbers::pi / (k[a] + kpad);
    n[a] = int(next_pow2(ext[a] / h));
  }
  return Grid::box(n, ext);
}

ResultRecord run_full_3d(const ExperimentConfig& cfg) {
  const Geometry geo = resolve_geometry(cfg, cfg.target);
  const FieldModel model = cfg.field_model(geo.a, geo.f);
  Grid grid;
  if (cfg.n_3d || cfg.extent_3d) {
    if (!(cfg.n_3d && cfg.extent_3d)) {
      throw ConfigError("grid_3d.n and grid_3d.extent_over_delta must be given together");
    }
    std::array<double, 3> ext;
    for (int a = 0; a < 3; ++a) ext[a] = (*cfg.extent_3d)[a] * cfg.physics.delta;
    grid = Grid::box(*cfg.n_3d, ext);
  } else {
    grid = auto_grid_3d(cfg, model);
  }
  PatchSource source(model, cfg.physics, cfg.patch_radius * cfg.physics.delta);
  return run_common("run-3d", cfg, geo, grid, cfg.nt_3d, source);
}

std::string sweep_csv(const std::vector<ResultRecord>& rows) {
  std::string out = "target_dz_over_delta,C_T,dz_T_over_delta,dy_T_over_delta,nx,ny,nz,steps,status\n";
  for (const ResultRecord& r : rows) {
    if (!r.error.empty()) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += fmt::format("{:.17g},nan,nan,nan,,,,,{}\n", r.target, msg);
      continue;
    }
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{},ok\n", r.target,
                       r.final_coherence, r.final_dz / r.delta, r.final_dy / r.delta,
                       r.grid.points(0), r.grid.points(1), r.grid.points(2), r.steps);
  }
  return out;
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> rows;
  for (double t : cfg.targets) {
    ExperimentConfig one = cfg;
    one.target = t;
    one.mode = Mode::full_3d;
    const std::string dir = (fs::path(cfg.out_dir) / fmt::format("dz_{:g}", t)).string();
    ResultRecord r;
    try {
      r = run_full_3d(one);
      write_results(r, dir);
    } catch (const Error& e) {
      r = ResultRecord{};
      r.target = t;
      r.delta = cfg.physics.delta;
      r.error = e.what();
      r.config_error = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GeometryError*>(&e) ||
                       dynamic_cast<const IoError*>(&e);
    }
    rows.push_back(std::move(r));
  }
  write_text((fs::path(cfg.out_dir) / "sweep.csv").string(), sweep_csv(rows));
  return rows;
}

std::string fieldmap_csv(const ExperimentConfig& cfg, const FieldModel& model) {
  std::string out = "x_um,y_um,z_um,Bx,By,Bz\n";
  auto axis = [&](int a, int i) {
    const auto& r = cfg.map_range[a];
    const int n = cfg.map_points[a];
    return n == 1 ? r[0] : r[0] + (r[1] - r[0]) * i / double(n - 1);
  };
  for (int ix = 0; ix < cfg.map_points[0]; ++ix) {
    for (int iy = 0; iy < cfg.map_points[1]; ++iy) {
      for (int iz = 0; iz < cfg.map_points[2]; ++iz) {
        const double x = axis(0, ix), y = axis(1, iy), z = axis(2, iz);
        const Eigen::Vector3d b = field_at(Eigen::Vector3d(um(x), um(y), um(z)), model);
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x, y, z, b.x(), b.y(), b.z());
      }
    }
  }
  return out;
}

}  // namespace sgi
