#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkdv/direct.hpp"
#include "gkdv/fits.hpp"
#include "gkdv/model.hpp"
#include "gkdv/rescaled.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column-major view of a series CSV.
struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool has(const std::string& name) const;
  /// Throws IoError if the column is missing.
  std::vector<double> column(const std::string& name) const;
};

/// "%.17g": round-trip exact for doubles, independent of locale.
std::string format_double(double v);

extern const std::vector<std::string> direct_series_columns;
extern const std::vector<std::string> rescaled_series_columns;

SeriesTable series_table(const DirectTrajectory& traj);
SeriesTable series_table(const RescaledTrajectory& traj);

/// One header row, then one row per record. Throws IoError (and creates no
/// file) when there are no rows.
void write_series(const std::string& path, const SeriesTable& table);
void write_series(const std::string& path, const DirectTrajectory& traj);
void write_series(const std::string& path, const RescaledTrajectory& traj);

SeriesTable read_series(const std::string& path);

struct SnapshotHeader {
  int N = 0;
  double D = 0;
  int n = 0;
  double eps = 0;
  double t = 0;
  // rescaled frame
  std::optional<double> tau;
  std::optional<double> L;
  std::optional<double> x_m;
  std::optional<double> xi0;
};

struct SnapshotFile {
  SnapshotHeader header;
  Field field;
};

/// "# key = value" header block followed by x,u columns.
void write_snapshot(const std::string& path, const Field& f, const SnapshotHeader& header);
SnapshotFile read_snapshot(const std::string& path);

/// Writes text to path, replacing an existing file.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace gkdv
