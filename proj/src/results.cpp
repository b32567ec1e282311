#include "sgi/results.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>

#include "sgi/errors.hpp"
#include "sgi/units.hpp"

namespace sgi {

namespace fs = std::filesystem;

void finalize(ResultRecord& r) {
  if (r.series.empty()) return;
  const ObservableRecord& last = r.series.back();
  r.final_coherence = last.coherence;
  r.final_dz = last.dz;
  r.final_dy = last.dy;
}

std::string observables_csv(const ResultRecord& r) {
  std::string out =
      "t_us,norm,sx,sy,sz,C,zc_up,zc_dn,dz_over_delta,dy_over_delta,width_z_up,width_z_dn\n";
  for (const ObservableRecord& o : r.series) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                       "{:.17g},{:.17g},{:.17g}\n",
                       to_us(o.time), o.norm, o.spin.x(), o.spin.y(), o.spin.z(), o.coherence,
                       to_um(o.centroid_up.z()), to_um(o.centroid_down.z()), o.dz / r.delta,
                       o.dy / r.delta, to_um(o.width_up.z()), to_um(o.width_down.z()));
  }
  return out;
}

std::string timing_csv(const PhaseTimer& t) {
  std::string out = "phase,seconds,percent\n";
  const double total = t.total();
  for (Phase p : kPhases) {
    const double s = t.seconds(p);
    out += fmt::format("{},{:.6f},{:.3f}\n", phase_name(p), s, total > 0 ? 100.0 * s / total : 0.0);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", p.parent_path().string(), ec.message()));
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path);
}

void write_results(const ResultRecord& r, const std::string& dir) {
  const fs::path d(dir);
  write_text((d / "observables.csv").string(), observables_csv(r));
  write_text((d / "config.snapshot").string(), r.config_snapshot);
  write_text((d / "timing.csv").string(), timing_csv(r.timing));
  nlohmann::json s = {
      {"label", r.label},
      {"target_dz_over_delta", r.target},
      {"a_um", to_um(r.a)},
      {"f", r.f},
      {"grid_points", {r.grid.points(0), r.grid.points(1), r.grid.points(2)}},
      {"grid_extent_um", {to_um(r.grid.extent(0)), to_um(r.grid.extent(1)), to_um(r.grid.extent(2))}},
      {"steps", r.steps},
      {"final_C", r.final_coherence},
      {"final_dz_over_delta", r.final_dz / r.delta},
      {"final_dy_over_delta", r.final_dy / r.delta},
      {"max_norm_drift", r.max_norm_drift},
      {"wall_seconds", r.wall_seconds},
  };
  if (!r.error.empty()) s["error"] = r.error;
  write_text((d / "summary.json").string(), s.dump(2) + "\n");
}

}  // namespace sgi
