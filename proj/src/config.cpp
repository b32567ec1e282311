#include "sgi/config.hpp"

#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>

#include "sgi/errors.hpp"
#include "sgi/grid.hpp"
#include "sgi/profile.hpp"
#include "sgi/units.hpp"

namespace sgi {

using json = nlohmann::json;

Mode parse_mode(const std::string& s) {
  if (s == "run-1d") return Mode::simplified_1d;
  if (s == "run-3d") return Mode::full_3d;
  if (s == "sweep") return Mode::sweep;
  if (s == "calibrate") return Mode::calibrate;
  if (s == "fieldmap") return Mode::fieldmap;
  throw ConfigError("unknown mode '" + s + "'");
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::simplified_1d: return "run-1d";
    case Mode::full_3d: return "run-3d";
    case Mode::sweep: return "sweep";
    case Mode::calibrate: return "calibrate";
    case Mode::fieldmap: return "fieldmap";
  }
  return "?";
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.alpha = 0.3 / um(1.0);
  c.profile_scale = um(1.0);
  return c;
}

double ExperimentConfig::resolved_bias() const {
  return bias ? *bias : default_bias(alpha * profile_scale);
}

FieldModel ExperimentConfig::field_model(double a_, double f_) const {
  return FieldModel(a_, f_, alpha, resolved_bias(), profile_scale, arrangement,
                    QuadratureSpec{12.0 * alpha, quadrature_nodes});
}

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

template <typename T>
void maybe(const json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

ChargeArrangement parse_arrangement(const std::string& s) {
  if (s == "like") return ChargeArrangement::like;
  if (s == "opposite") return ChargeArrangement::opposite;
  throw ConfigError("field.arrangement must be 'like' or 'opposite'");
}

ForceModel parse_force_model(const std::string& s) {
  if (s == "axial") return ForceModel::axial;
  if (s == "adiabatic") return ForceModel::adiabatic;
  throw ConfigError("calibration.model must be 'axial' or 'adiabatic'");
}

void apply_json(const json& j, ExperimentConfig& c) {
  only_keys(j, "config",
            {"mode", "physics", "field", "target_dz_over_delta", "targets_dz_over_delta", "grid_1d",
             "grid_3d", "observe_every", "calibration", "fieldmap", "out_dir", "workers",
             "checkpoint_every"});
  const UnitSystem& u = atomic_units();
  if (j.contains("mode")) c.mode = parse_mode(get<std::string>(j, "mode", "config"));

  if (j.contains("physics")) {
    const json& p = j["physics"];
    only_keys(p, "physics", {"mass_Da", "moment_muB", "length_um", "duration_us", "delta_um"});
    if (p.contains("mass_Da")) c.physics.mass = u.to_internal(get<double>(p, "mass_Da", "physics"), Unit::dalton);
    if (p.contains("moment_muB")) {
      c.physics.moment = u.to_internal(get<double>(p, "moment_muB", "physics"), Unit::bohr_magneton);
    }
    if (p.contains("length_um")) c.physics.length = um(get<double>(p, "length_um", "physics"));
    if (p.contains("duration_us")) c.physics.duration = us(get<double>(p, "duration_us", "physics"));
    if (p.contains("delta_um")) c.physics.delta = um(get<double>(p, "delta_um", "physics"));
    c.physics.y_start = -0.5 * c.physics.length;
  }

  if (j.contains("field")) {
    const json& f = j["field"];
    only_keys(f, "field", {"alpha_per_um", "profile_scale_um", "bias_au", "arrangement",
                           "quadrature_nodes", "a_um", "f"});
    if (f.contains("alpha_per_um")) c.alpha = get<double>(f, "alpha_per_um", "field") / um(1.0);
    if (f.contains("profile_scale_um")) c.profile_scale = um(get<double>(f, "profile_scale_um", "field"));
    if (f.contains("bias_au")) c.bias = get<double>(f, "bias_au", "field");
    if (f.contains("arrangement")) c.arrangement = parse_arrangement(get<std::string>(f, "arrangement", "field"));
    maybe(f, "quadrature_nodes", "field", c.quadrature_nodes);
    if (f.contains("a_um")) c.a = um(get<double>(f, "a_um", "field"));
    if (f.contains("f")) c.f = get<double>(f, "f", "field");
  }

  maybe(j, "target_dz_over_delta", "config", c.target);
  maybe(j, "targets_dz_over_delta", "config", c.targets);

  if (j.contains("grid_1d")) {
    const json& g = j["grid_1d"];
    only_keys(g, "grid_1d", {"nz", "extent_over_delta", "nt"});
    maybe(g, "nz", "grid_1d", c.nz_1d);
    maybe(g, "extent_over_delta", "grid_1d", c.extent_1d);
    maybe(g, "nt", "grid_1d", c.nt_1d);
  }

  if (j.contains("grid_3d")) {
    const json& g = j["grid_3d"];
    only_keys(g, "grid_3d", {"n", "extent_over_delta", "nt", "patch_radius_over_delta",
                             "k_margin_per_delta", "extent_margin_over_delta"});
    if (g.contains("n")) c.n_3d = get<std::array<int, 3>>(g, "n", "grid_3d");
    if (g.contains("extent_over_delta")) {
      c.extent_3d = get<std::array<double, 3>>(g, "extent_over_delta", "grid_3d");
    }
    maybe(g, "nt", "grid_3d", c.nt_3d);
    maybe(g, "patch_radius_over_delta", "grid_3d", c.patch_radius);
    maybe(g, "k_margin_per_delta", "grid_3d", c.k_margin);
    maybe(g, "extent_margin_over_delta", "grid_3d", c.x_margin);
  }

  maybe(j, "observe_every", "config", c.observe_every);

  if (j.contains("calibration")) {
    const json& g = j["calibration"];
    only_keys(g, "calibration", {"n_steps", "model", "final_tolerance_over_delta",
                                 "peak_tolerance_over_delta", "a_range_um", "f_range",
                                 "max_outer"});
    maybe(g, "n_steps", "calibration", c.calibration.n_steps);
    if (g.contains("model")) c.calibration.model = parse_force_model(get<std::string>(g, "model", "calibration"));
    maybe(g, "final_tolerance_over_delta", "calibration", c.calibration.final_tolerance);
    maybe(g, "peak_tolerance_over_delta", "calibration", c.calibration.peak_tolerance);
    maybe(g, "max_outer", "calibration", c.calibration.max_outer);
    if (g.contains("a_range_um")) {
      const auto r = get<std::array<double, 2>>(g, "a_range_um", "calibration");
      c.box.a_min = um(r[0]);
      c.box.a_max = um(r[1]);
    }
    if (g.contains("f_range")) {
      const auto r = get<std::array<double, 2>>(g, "f_range", "calibration");
      c.box.f_min = r[0];
      c.box.f_max = r[1];
    }
  }

  if (j.contains("fieldmap")) {
    const json& g = j["fieldmap"];
    only_keys(g, "fieldmap", {"x_um", "y_um", "z_um", "points"});
    const char* axes[3] = {"x_um", "y_um", "z_um"};
    for (int a = 0; a < 3; ++a) {
      if (g.contains(axes[a])) c.map_range[a] = get<std::array<double, 2>>(g, axes[a], "fieldmap");
    }
    maybe(g, "points", "fieldmap", c.map_points);
  }

  maybe(j, "out_dir", "config", c.out_dir);
  maybe(j, "workers", "config", c.workers);
  maybe(j, "checkpoint_every", "config", c.checkpoint_every);
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  apply_json(j, base);
  validate(base);
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json_text(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  const UnitSystem& u = atomic_units();
  json j;
  j["mode"] = mode_name(c.mode);
  j["physics"] = {
      {"mass_Da", u.from_internal(c.physics.mass, Unit::dalton)},
      {"moment_muB", u.from_internal(c.physics.moment, Unit::bohr_magneton)},
      {"length_um", to_um(c.physics.length)},
      {"duration_us", to_us(c.physics.duration)},
      {"delta_um", to_um(c.physics.delta)},
  };
  json field = {
      {"alpha_per_um", c.alpha * um(1.0)},
      {"profile_scale_um", to_um(c.profile_scale)},
      {"bias_au", c.resolved_bias()},
      {"arrangement", c.arrangement == ChargeArrangement::like ? "like" : "opposite"},
      {"quadrature_nodes", c.quadrature_nodes},
  };
  if (c.a) field["a_um"] = to_um(*c.a);
  if (c.f) field["f"] = *c.f;
  j["field"] = field;
  j["target_dz_over_delta"] = c.target;
  j["targets_dz_over_delta"] = c.targets;
  j["grid_1d"] = {{"nz", c.nz_1d}, {"extent_over_delta", c.extent_1d}, {"nt", c.nt_1d}};
  json g3 = {{"nt", c.nt_3d},
             {"patch_radius_over_delta", c.patch_radius},
             {"k_margin_per_delta", c.k_margin},
             {"extent_margin_over_delta", c.x_margin}};
  if (c.n_3d) g3["n"] = *c.n_3d;
  if (c.extent_3d) g3["extent_over_delta"] = *c.extent_3d;
  j["grid_3d"] = g3;
  j["observe_every"] = c.observe_every;
  j["calibration"] = {
      {"n_steps", c.calibration.n_steps},
      {"model", c.calibration.model == ForceModel::axial ? "axial" : "adiabatic"},
      {"final_tolerance_over_delta", c.calibration.final_tolerance},
      {"peak_tolerance_over_delta", c.calibration.peak_tolerance},
      {"max_outer", c.calibration.max_outer},
      {"a_range_um", {to_um(c.box.a_min), to_um(c.box.a_max)}},
      {"f_range", {c.box.f_min, c.box.f_max}},
  };
  j["fieldmap"] = {{"x_um", c.map_range[0]},
                   {"y_um", c.map_range[1]},
                   {"z_um", c.map_range[2]},
                   {"points", c.map_points}};
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  j["checkpoint_every"] = c.checkpoint_every;
  return j.dump(2) + "\n";
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  const PhysParams& p = c.physics;
  require(p.mass > 0 && p.moment > 0 && p.length > 0 && p.duration > 0 && p.delta > 0,
          "physics parameters must be positive");
  require(c.alpha > 0 && c.profile_scale > 0, "alpha and the profile scale must be positive");
  require(!c.bias || std::isfinite(*c.bias), "bias must be finite");
  require(c.quadrature_nodes >= 8, "quadrature_nodes must be at least 8");
  require(!c.a || *c.a > 0, "a must be positive");
  require(!c.f || *c.f >= 0, "f must be non-negative");
  require(c.target >= 0, "target must be non-negative");
  for (double t : c.targets) require(t >= 0, "targets must be non-negative");
  require(c.nz_1d >= 2 && is_power_of_two(c.nz_1d), "grid_1d.nz must be a power of two");
  require(c.extent_1d > 8, "grid_1d.extent_over_delta must exceed 8");
  require(c.nt_1d >= 1 && c.nt_3d >= 1, "step counts must be positive");
  if (c.n_3d) {
    for (int n : *c.n_3d) require(n >= 2 && is_power_of_two(n), "grid_3d.n must be powers of two");
  }
  if (c.extent_3d) {
    for (double e : *c.extent_3d) require(e > 8, "grid_3d.extent_over_delta entries must exceed 8");
  }
  require(c.patch_radius > 0 && c.k_margin > 0 && c.x_margin > 0, "3D sizing margins must be positive");
  require(c.observe_every >= 0, "observe_every must be non-negative");
  require(c.calibration.n_steps >= 10000 && c.calibration.n_steps % 2 == 0,
          "calibration.n_steps must be even and at least 10000");
  require(c.box.a_min > 0 && c.box.a_min < c.box.a_max, "calibration.a_range_um is empty");
  require(c.box.f_min >= 0 && c.box.f_min < c.box.f_max, "calibration.f_range is empty");
  for (int n : c.map_points) require(n >= 1, "fieldmap.points must be positive");
  require(c.workers >= 1, "workers must be at least 1");
  require(c.checkpoint_every >= 0, "checkpoint_every must be non-negative");
}

int workers_from_env(int fallback) {
  const char* v = std::getenv("SGI_WORKERS");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw ConfigError(fmt::format("SGI_WORKERS='{}' is not a positive worker count", v));
  }
  return int(n);
}

}  // namespace sgi
