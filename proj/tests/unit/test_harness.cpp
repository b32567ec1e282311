#include <doctest.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sgi/checkpoint.hpp"
#include "sgi/config.hpp"
#include "sgi/errors.hpp"
#include "sgi/experiment.hpp"
#include "sgi/spinor.hpp"
#include "sgi/units.hpp"

extern char** environ;

using namespace sgi;
namespace fs = std::filesystem;

namespace {

// Roughly the 5 delta calibration; accuracy does not matter here.
constexpr double kA = 0.717711;
constexpr double kF = 2.15152e-4;
// 1 delta, small enough for a coarse 3D grid.
constexpr double kA1 = 0.385378;
constexpr double kF1 = 2.4506e-5;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sgi_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_1d(const fs::path& out) {
  ExperimentConfig c = default_config();
  c.a = um(kA);
  c.f = kF;
  c.target = 5.0;
  c.nz_1d = 1024;
  c.nt_1d = 512;
  c.observe_every = 32;
  c.out_dir = out.string();
  return c;
}

ExperimentConfig small_3d(const fs::path& out) {
  ExperimentConfig c = small_1d(out);
  c.mode = Mode::full_3d;
  c.a = um(kA1);
  c.f = kF1;
  c.target = 1.0;
  c.n_3d = std::array<int, 3>{32, 32, 64};
  c.extent_3d = std::array<double, 3>{14.0, 14.0, 15.0};
  c.nt_3d = 64;
  c.observe_every = 16;
  return c;
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(SGI_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = config_from_json_text(R"({
    "mode": "run-3d",
    "target_dz_over_delta": 10,
    "field": {"a_um": 1.0, "f": 0.001, "arrangement": "opposite"},
    "grid_1d": {"nz": 2048},
    "workers": 3
  })");
  CHECK(c.mode == Mode::full_3d);
  CHECK(c.target == 10.0);
  CHECK(*c.a == doctest::Approx(um(1.0)));
  CHECK(*c.f == 0.001);
  CHECK(c.arrangement == ChargeArrangement::opposite);
  CHECK(c.nz_1d == 2048);
  CHECK(c.workers == 3);
  CHECK(c.nt_1d == default_config().nt_1d);

  // The snapshot reads back to the same configuration.
  const ExperimentConfig d = config_from_json_text(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));

  CHECK_THROWS_AS(config_from_json_text(R"({"grid_1d": {"nzz": 4}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"surprise": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"grid_1d": {"nz": 1000}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"grid_1d": {"nz": "big"}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"mode": "run-2d"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{ not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/sgi.json"), ConfigError);
}

TEST_CASE("worker count from the environment") {
  ::unsetenv("SGI_WORKERS");
  CHECK(workers_from_env(5) == 5);
  ::setenv("SGI_WORKERS", "3", 1);
  CHECK(workers_from_env(5) == 3);
  ::setenv("SGI_WORKERS", "three", 1);
  CHECK_THROWS_AS(workers_from_env(5), ConfigError);
  ::setenv("SGI_WORKERS", "0", 1);
  CHECK_THROWS_AS(workers_from_env(5), ConfigError);
  ::unsetenv("SGI_WORKERS");
}

TEST_CASE("result files") {
  ResultRecord r;
  r.delta = 1.0;
  CHECK(observables_csv(r).find('\n') == observables_csv(r).size() - 1);
  CHECK(observables_csv(r).rfind("t_us,norm,sx,sy,sz,C,", 0) == 0);

  PhaseTimer t;
  t.add(Phase::transforms, 1.0);
  t.add(Phase::potential, 2.0);
  t.add(Phase::observables, 0.5);
  std::istringstream in(timing_csv(t));
  std::string line;
  std::getline(in, line);
  CHECK(line == "phase,seconds,percent");
  double sum = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    sum += std::stod(line.substr(line.rfind(',') + 1));
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(sum == doctest::Approx(100.0).epsilon(0.005));

  const fs::path dir = scratch("unwritable");
  write_text((dir / "blocker").string(), "x");
  CHECK_THROWS_AS(write_text((dir / "blocker" / "inner.csv").string(), "x"), IoError);
}

TEST_CASE("1D runs are reproducible and complete") {
  const fs::path out = scratch("repeat");
  ExperimentConfig c = small_1d(out);
  const ResultRecord a = run_simplified_1d(c);
  const ResultRecord b = run_simplified_1d(c);
  CHECK(observables_csv(a) == observables_csv(b));
  CHECK(a.series.size() == std::size_t(c.nt_1d / c.observe_every + 1));
  CHECK(a.series.front().time == 0.0);
  CHECK(a.series.back().time == doctest::Approx(c.physics.duration).epsilon(1e-14));
  CHECK(a.max_norm_drift <= 1e-9);

  write_results(a, out.string());
  for (const char* name : {"observables.csv", "config.snapshot", "timing.csv", "summary.json"}) {
    CHECK(fs::exists(out / name));
  }
  // The snapshot is a valid configuration.
  CHECK_NOTHROW(config_from_json_text(slurp(out / "config.snapshot")));

  // Percentages in the written timing table sum to 100.
  std::istringstream in(slurp(out / "timing.csv"));
  std::string line;
  std::getline(in, line);
  double sum = 0.0;
  while (std::getline(in, line)) sum += std::stod(line.substr(line.rfind(',') + 1));
  CHECK(sum == doctest::Approx(100.0).epsilon(0.005));
}

TEST_CASE("zero field 1D run keeps the spinor coherent and together") {
  ExperimentConfig c = small_1d(scratch("zero"));
  c.f = 0.0;
  const ResultRecord r = run_simplified_1d(c);
  CHECK(r.final_coherence == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r.final_dz) <= 1e-12 * c.physics.delta);
}

TEST_CASE("geometry resolution") {
  const fs::path out = scratch("geometry");
  ExperimentConfig c = default_config();
  c.out_dir = out.string();
  CHECK_THROWS_AS(resolve_geometry(c, 5.0), ConfigError);
  c.a = um(1.0);
  CHECK_THROWS_AS(resolve_geometry(c, 5.0), ConfigError);
  c.a.reset();

  CalibrationResult row;
  row.target = 5.0 * c.physics.delta;
  row.a = um(0.75);
  row.f = 2e-4;
  write_text((out / "calibration.csv").string(), calibration_csv({row}, c.physics.delta));
  const Geometry g = resolve_geometry(c, 5.0);
  CHECK(g.a == doctest::Approx(um(0.75)).epsilon(1e-15));
  CHECK(g.f == 2e-4);
  CHECK_THROWS_AS(resolve_geometry(c, 10.0), ConfigError);
  CHECK_THROWS_AS(run_simplified_1d([&] { auto d = c; d.target = 10.0; return d; }()), ConfigError);
}

TEST_CASE("checkpoint container") {
  const fs::path dir = scratch("ckpt");
  const Grid g = Grid::box({4, 8, 16}, {1.0, 2.0, 3.0});
  SpinorField f(g);
  for (Eigen::Index i = 0; i < f.up.size(); ++i) {
    f.up[i] = {std::sin(0.1 * i), 1.0 / (1.0 + i)};
    f.down[i] = {std::cos(0.3 * i), -0.5};
  }
  f.time = 12.5;
  CheckpointMeta meta;
  meta.step = 7;
  meta.run = R"({"kind":"test"})";
  ObservableRecord rec;
  rec.time = 1.0;
  rec.coherence = 0.5;
  rec.spin = Eigen::Vector3d(0.1, 0.2, 0.3);
  meta.series = {rec, rec};
  const std::string path = (dir / "c.bin").string();
  write_checkpoint(path, f, meta);

  const Restored r = read_checkpoint(path, g);
  CHECK(r.meta.step == 7);
  CHECK(r.meta.run == meta.run);
  REQUIRE(r.meta.series.size() == 2);
  CHECK(r.meta.series[1].spin == rec.spin);
  CHECK(r.field.time == 12.5);
  CHECK(r.field.up.isApprox(f.up, 0.0));
  CHECK((r.field.down == f.down).all());

  CHECK_THROWS_AS(read_checkpoint(path, Grid::box({4, 8, 32}, {1.0, 2.0, 3.0})), GridMismatchError);
  CHECK_THROWS_AS(read_checkpoint(path, Grid::box({4, 8, 16}, {1.0, 2.0, 3.5})), GridMismatchError);

  const std::string bytes = slurp(path);
  write_file(dir / "short.bin", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(read_checkpoint((dir / "short.bin").string()), IntegrityError);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  write_file(dir / "flip.bin", flipped);
  CHECK_THROWS_AS(read_checkpoint((dir / "flip.bin").string()), IntegrityError);
  write_file(dir / "magic.bin", "NOTACKPT" + bytes.substr(8));
  CHECK_THROWS_AS(read_checkpoint((dir / "magic.bin").string()), IntegrityError);
  write_file(dir / "extra.bin", bytes + "x");
  CHECK_THROWS_AS(read_checkpoint((dir / "extra.bin").string()), IntegrityError);
  CHECK_THROWS_AS(read_checkpoint((dir / "missing.bin").string()), IoError);
}

TEST_CASE("resume from an in-process checkpoint reproduces the run") {
  const fs::path out = scratch("resume");
  ExperimentConfig c = small_1d(out);
  c.checkpoint_every = 512;  // only the final state
  const ResultRecord full = run_simplified_1d(c);
  REQUIRE(fs::exists(out / "checkpoint.bin"));
  // Resuming a finished run adds nothing and reproduces the series.
  c.resume = (out / "checkpoint.bin").string();
  const ResultRecord again = run_simplified_1d(c);
  CHECK(observables_csv(again) == observables_csv(full));

  // A checkpoint from another geometry is refused.
  ExperimentConfig other = c;
  other.f = 2.0 * kF;
  CHECK_THROWS_AS(run_simplified_1d(other), ConfigError);
}

TEST_CASE("killed CLI run resumes to the uninterrupted result") {
  const fs::path root = scratch("kill");
  const fs::path cfg = root / "c.json";
  write_file(cfg, R"({"field": {"a_um": 0.717711, "f": 2.15152e-4},
                       "grid_1d": {"nz": 2048, "nt": 2048}, "observe_every": 32})");
  const std::string common = "--config " + cfg.string() + " --checkpoint-every 64 ";

  REQUIRE(cli(common + "--out " + (root / "ref").string() + " run-1d --target-dz 5") == 0);

  // Start the same run and kill it once its first checkpoint lands.
  const fs::path part = root / "part";
  fs::create_directories(part);
  const std::string cfg_s = cfg.string(), part_s = part.string();
  std::vector<std::string> args = {SGI_CLI,  "--config", cfg_s, "--checkpoint-every", "64",
                                   "--out", part_s,   "run-1d", "--target-dz", "5"};
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 1, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  REQUIRE(posix_spawn(&pid, SGI_CLI, &fa, nullptr, argv.data(), environ) == 0);
  posix_spawn_file_actions_destroy(&fa);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  while (!fs::exists(part / "checkpoint.bin") && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  REQUIRE(fs::exists(part / "checkpoint.bin"));
  const bool interrupted = WIFSIGNALED(status);
  CHECK(interrupted);
  const Restored r = read_checkpoint((part / "checkpoint.bin").string());
  MESSAGE("killed after step " << r.meta.step);
  CHECK(r.meta.step < 2048);
  fs::copy_file(part / "checkpoint.bin", root / "saved.bin");

  REQUIRE(cli(common + "--out " + part_s + " --resume " + (root / "saved.bin").string() +
              " run-1d --target-dz 5") == 0);
  CHECK(slurp(part / "observables.csv") == slurp(root / "ref" / "observables.csv"));
}

TEST_CASE("sweep of one entry equals the single 3D run") {
  const fs::path out = scratch("sweep");
  ExperimentConfig c = small_3d(out);
  c.targets = {1.0};
  const ResultRecord single = run_full_3d(c);
  CHECK(single.max_norm_drift <= 1e-9);
  CHECK(single.final_coherence > 0.99);
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].error.empty());
  CHECK(observables_csv(rows[0]) == observables_csv(single));
  CHECK(fs::exists(out / "sweep.csv"));
  CHECK(fs::exists(out / "dz_1" / "observables.csv"));

  // A failing entry is recorded and the sweep carries on.
  c.targets = {7.0, 1.0};
  c.a.reset();
  c.f.reset();
  CalibrationResult row;
  row.target = 1.0 * c.physics.delta;
  row.a = um(kA1);
  row.f = kF1;
  write_text((out / "calibration.csv").string(), calibration_csv({row}, c.physics.delta));
  const auto mixed = run_sweep(c);
  REQUIRE(mixed.size() == 2);
  CHECK_FALSE(mixed[0].error.empty());
  CHECK(mixed[0].config_error);
  CHECK(mixed[1].error.empty());
  CHECK(observables_csv(mixed[1]) == observables_csv(single));
  const std::string csv = slurp(out / "sweep.csv");
  CHECK(csv.find(",ok\n") != std::string::npos);
}

TEST_CASE("auto-sized 3D grid") {
  ExperimentConfig c = default_config();
  const Grid g = auto_grid_3d(c, c.field_model(um(0.717711), 2.15152e-4));
  for (int a = 0; a < 3; ++a) {
    CHECK(is_power_of_two(std::size_t(g.points(a))));
    CHECK(g.extent(a) >= 14.0 * c.physics.delta);
  }
  // The z extent holds both branches at the 5 delta peak.
  CHECK(g.extent(2) >= 2.0 * (2.5 + 7.0) * c.physics.delta);
  CHECK(g.points(2) >= g.points(0));
}

TEST_CASE("CLI exit codes") {
  const fs::path root = scratch("cli");
  const std::string out = " --out " + root.string();
  CHECK(cli("--help") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("run-1d --bogus") == 2);
  CHECK(cli("--config /nonexistent.json run-1d") == 2);

  write_file(root / "unknown.json", R"({"fild": {}})");
  CHECK(cli("--config " + (root / "unknown.json").string() + out + " run-1d") == 2);
  // No calibration table and no explicit geometry.
  CHECK(cli(out + " run-1d --target-dz 5") == 2);

  write_file(root / "ok.json", R"({"field": {"a_um": 0.717711, "f": 2.15152e-4}})");
  CHECK(cli("--config " + (root / "ok.json").string() + out + " fieldmap") == 0);
  CHECK(fs::exists(root / "fieldmap.csv"));
  CHECK(::setenv("SGI_WORKERS", "lots", 1) == 0);
  CHECK(cli("--config " + (root / "ok.json").string() + out + " fieldmap") == 2);
  ::unsetenv("SGI_WORKERS");

  // The packet runs into the edge of a box this small.
  write_file(root / "tight.json", R"({"field": {"a_um": 0.717711, "f": 2.15152e-4},
                                      "grid_1d": {"nz": 256, "extent_over_delta": 10, "nt": 256}})");
  CHECK(cli("--config " + (root / "tight.json").string() + out + " run-1d") == 3);
}
