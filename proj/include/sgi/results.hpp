#pragma once

#include <string>
#include <vector>

#include "sgi/grid.hpp"
#include "sgi/observables.hpp"
#include "sgi/timing.hpp"

namespace sgi {

struct ResultRecord {
  std::string label;
  std::string config_snapshot;  // JSON text
  double delta = 0.0;           // for scaling the dz/dy columns
  double target = 0.0;          // in delta
  double a = 0.0;
  double f = 0.0;
  Grid grid;
  long steps = 0;
  std::vector<ObservableRecord> series;
  double final_coherence = 0.0;
  double final_dz = 0.0;
  double final_dy = 0.0;
  double max_norm_drift = 0.0;
  double wall_seconds = 0.0;
  PhaseTimer timing;
  std::string error;  // non-empty for a failed sweep entry
  bool config_error = false;  // the failure was a configuration problem
};

// Fills the final_* fields from the last series entry.
void finalize(ResultRecord& r);

// CSV text of the observable series (header only when empty).
std::string observables_csv(const ResultRecord& r);
std::string timing_csv(const PhaseTimer& t);

// Writes observables.csv, config.snapshot, timing.csv and summary.json into
// dir (created if needed).  Throws IoError with the offending path.
void write_results(const ResultRecord& r, const std::string& dir);

// Writes text to path, creating parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace sgi
