#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

#include "sgi/config.hpp"
#include "sgi/errors.hpp"
#include "sgi/experiment.hpp"
#include "sgi/fft.hpp"
#include "sgi/units.hpp"

namespace fs = std::filesystem;
using namespace sgi;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;

struct Flags {
  std::string config;
  int workers = 0;
  std::string out;
  long checkpoint_every = -1;
  std::string resume;
  std::vector<double> targets;
  long nt = 0;
};

ExperimentConfig resolve(const Flags& fl, Mode mode) {
  ExperimentConfig cfg = fl.config.empty() ? default_config() : load_config(fl.config);
  cfg.mode = mode;
  cfg.workers = fl.workers > 0 ? fl.workers : workers_from_env(cfg.workers);
  if (!fl.out.empty()) cfg.out_dir = fl.out;
  if (fl.checkpoint_every >= 0) cfg.checkpoint_every = fl.checkpoint_every;
  cfg.resume = fl.resume;
  if (!fl.targets.empty()) {
    if (mode == Mode::simplified_1d || mode == Mode::full_3d || mode == Mode::fieldmap) {
      if (fl.targets.size() != 1) throw ConfigError("this verb takes a single --target-dz");
      cfg.target = fl.targets[0];
    } else {
      cfg.targets = fl.targets;
    }
  }
  if (fl.nt > 0) {
    if (mode == Mode::simplified_1d) cfg.nt_1d = fl.nt;
    if (mode == Mode::full_3d || mode == Mode::sweep) cfg.nt_3d = fl.nt;
  }
  validate(cfg);
  set_worker_count(cfg.workers);
  return cfg;
}

void report(const ResultRecord& r) {
  fmt::print("{}: target {:g} delta, a = {:.6g} um, f = {:.6g}, grid {}x{}x{}, {} steps\n", r.label,
             r.target, to_um(r.a), r.f, r.grid.points(0), r.grid.points(1), r.grid.points(2), r.steps);
  fmt::print("  C(T) = {:.12f}  dZ(T) = {:.3e} delta  dY(T) = {:.3e} delta  norm drift {:.2e}  {:.1f} s\n",
             r.final_coherence, r.final_dz / r.delta, r.final_dy / r.delta, r.max_norm_drift,
             r.wall_seconds);
}

// Keeps rows of an existing table whose targets are not being recalibrated.
std::string merge_calibration(const std::string& path, const std::string& fresh,
                              const std::vector<double>& targets) {
  std::ifstream in(path);
  if (!in) return fresh;
  std::string header, line, kept;
  std::getline(in, header);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t = 0.0;
    try {
      t = std::stod(line.substr(0, line.find(',')));
    } catch (const std::exception&) {
      continue;
    }
    bool replaced = false;
    for (double x : targets) replaced = replaced || std::abs(x - t) <= 1e-9 * std::max(1.0, x);
    if (!replaced) kept += line + "\n";
  }
  return fresh + kept;
}

int run(Mode mode, const Flags& fl) {
  const ExperimentConfig cfg = resolve(fl, mode);
  switch (mode) {
    case Mode::calibrate: {
      const auto rows = run_calibration(cfg, cfg.targets);
      const std::string path = (fs::path(cfg.out_dir) / "calibration.csv").string();
      const std::string text =
          merge_calibration(path, calibration_csv(rows, cfg.physics.delta), cfg.targets);
      write_text(path, text);
      write_text((fs::path(cfg.out_dir) / "calibration.config.snapshot").string(), config_to_json(cfg));
      for (const auto& r : rows) {
        fmt::print("target {:g} delta: a = {:.9g} um, f = {:.12g}, dZ(T/2) = {:.9g} delta, "
                   "dZ(T) = {:.3e} delta ({} outer, {} trajectories)\n",
                   r.target / cfg.physics.delta, to_um(r.a), r.f, r.dz_half / cfg.physics.delta,
                   r.dz_final / cfg.physics.delta, r.outer_iterations, r.inner_iterations);
      }
      fmt::print("wrote {}\n", path);
      return kOk;
    }
    case Mode::simplified_1d:
    case Mode::full_3d: {
      const ResultRecord r = mode == Mode::simplified_1d ? run_simplified_1d(cfg) : run_full_3d(cfg);
      write_results(r, cfg.out_dir);
      report(r);
      return kOk;
    }
    case Mode::sweep: {
      const auto rows = run_sweep(cfg);
      bool numerical = false;
      bool config = false;
      for (const auto& r : rows) {
        if (r.error.empty()) {
          report(r);
        } else {
          fmt::print("target {:g} delta failed: {}\n", r.target, r.error);
          (r.config_error ? config : numerical) = true;
        }
      }
      fmt::print("wrote {}\n", (fs::path(cfg.out_dir) / "sweep.csv").string());
      if (numerical) return kNumerical;
      if (config) return kConfig;
      return kOk;
    }
    case Mode::fieldmap: {
      const Geometry g = resolve_geometry(cfg, cfg.target);
      const std::string path = (fs::path(cfg.out_dir) / "fieldmap.csv").string();
      write_text(path, fieldmap_csv(cfg, cfg.field_model(g.a, g.f)));
      fmt::print("wrote {}\n", path);
      return kOk;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral split-operator simulator for a full-loop Stern-Gerlach interferometer"};
  app.require_subcommand(1);
  Flags fl;
  app.add_option("--config", fl.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--workers", fl.workers, "worker threads (default: SGI_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", fl.out, "output directory");
  app.add_option("--checkpoint-every", fl.checkpoint_every, "write a checkpoint every N steps")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--resume", fl.resume, "continue from a checkpoint file")->check(CLI::ExistingFile);

  std::map<CLI::App*, Mode> verbs;
  auto verb = [&](const char* name, const char* help, Mode m) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    verbs[sub] = m;
    return sub;
  };
  verb("calibrate", "search (a, f) for target peak separations", Mode::calibrate)
      ->add_option("--target-dz", fl.targets, "peak separations in units of delta")
      ->delimiter(',');
  auto* r1 = verb("run-1d", "simplified one-dimensional run", Mode::simplified_1d);
  auto* r3 = verb("run-3d", "full three-dimensional run", Mode::full_3d);
  auto* sw = verb("sweep", "full 3D runs over a list of separations", Mode::sweep);
  auto* fm = verb("fieldmap", "sample B on a box", Mode::fieldmap);
  for (CLI::App* sub : {r1, r3, fm}) sub->add_option("--target-dz", fl.targets, "peak separation in delta");
  sw->add_option("--target-dz", fl.targets, "peak separations in delta")->delimiter(',');
  for (CLI::App* sub : {r1, r3, sw}) sub->add_option("--nt", fl.nt, "time steps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  Mode mode = Mode::simplified_1d;
  for (const auto& [sub, m] : verbs) {
    if (sub->parsed()) mode = m;
  }
  try {
    return run(mode, fl);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const GeometryError& e) {
    fmt::print(stderr, "config error (geometry): {}\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    fmt::print(stderr, "config error (i/o): {}\n", e.what());
    return kConfig;
  } catch (const IntegrityError& e) {
    fmt::print(stderr, "config error (checkpoint): {}\n", e.what());
    return kConfig;
  } catch (const GridMismatchError& e) {
    fmt::print(stderr, "config error (checkpoint): {}\n", e.what());
    return kConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
