#pragma once

#include <string>
#include <vector>

#include "sgi/observables.hpp"
#include "sgi/spinor.hpp"

namespace sgi {

struct CheckpointMeta {
  long step = 0;
  std::string run;  // JSON identifying the run; compared on resume
  std::vector<ObservableRecord> series;
};

// Versioned little-endian container: header, grid, time, metadata, both
// amplitude arrays, crc32 trailer.  Written to a temporary file and renamed.
void write_checkpoint(const std::string& path, const SpinorField& field, const CheckpointMeta& meta);

struct Restored {
  SpinorField field;
  CheckpointMeta meta;
};

// Throws IntegrityError for truncation, bad magic/version or checksum, and
// GridMismatchError when `expected` differs from the stored grid.
Restored read_checkpoint(const std::string& path);
Restored read_checkpoint(const std::string& path, const Grid& expected);

}  // namespace sgi
