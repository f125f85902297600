#pragma once

#include <string>
#include <vector>

#include "gkdv/config.hpp"
#include "gkdv/io.hpp"

namespace gkdv {

/// Process exit codes of the command-line driver.
enum class ExitStatus : int {
  clean = 0,
  hard_failure = 1,
  truncated = 2,  // stopped early by a reliability rule; rows up to the last reliable step are kept
};

struct RunOutcome {
  ExitStatus status = ExitStatus::clean;
  std::string summary;
  std::vector<std::string> files;  // written, relative to the output directory
};

/// Initial data of a direct or rescaled run on cfg.grid(). Snapshot files are
/// resampled when their grid differs.
Field initial_field(const RunConfig& cfg);

/// Blow-up fits of a stored series (direct or rescaled columns) as a JSON
/// document. ok is false when either fixed-exponent t* fit failed.
struct BlowupReport {
  std::string json;
  bool ok = false;
  double t_star_linf = 0;
  double t_star_l2ux = 0;
};

BlowupReport blowup_report(const SeriesTable& series, const RunConfig& cfg);

/// Executes cfg.mode, writing into cfg.output.directory (created if needed).
/// Configuration and I/O errors propagate as exceptions.
RunOutcome run(const RunConfig& cfg);

/// Worker count for sweep mode: cfg.sweep.workers, else GKDV_WORKERS, else 1.
int sweep_workers(const RunConfig& cfg);

}  // namespace gkdv
