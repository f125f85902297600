#include "gkdv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gkdv {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view s, const std::string& path, int line) {
  const std::string tok(trim(s));
  // strtod accepts nan/inf, which write_series may emit
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw IoError(path + ":" + std::to_string(line) + ": not a number: '" + tok + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

bool SeriesTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> SeriesTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw IoError("series has no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string> direct_series_columns = {
    "t", "linf", "l2ux_sq", "mass", "energy", "delta", "tail", "x_m", "iterations"};

const std::vector<std::string> rescaled_series_columns = {
    "tau",  "t",    "L",    "a",      "v",          "linf", "l2ux_sq",  "mass", "energy",
    "delta", "tail", "x_m", "x_max", "l2_uxi", "mass_drift", "pin", "boundary"};

SeriesTable series_table(const DirectTrajectory& traj) {
  SeriesTable s{direct_series_columns, {}};
  s.rows.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    s.rows.push_back({r.t, r.inv.linf, r.inv.l2_ux * r.inv.l2_ux, r.inv.mass, r.inv.energy, r.delta,
                      r.tail, r.x_max, static_cast<double>(r.iterations)});
  }
  return s;
}

SeriesTable series_table(const RescaledTrajectory& traj) {
  SeriesTable s{rescaled_series_columns, {}};
  s.rows.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    s.rows.push_back({r.tau, r.t, r.L, r.a, r.v, r.linf, r.l2ux * r.l2ux, r.mass, r.energy, r.delta,
                      r.tail, r.x_m, r.x_max, r.l2_uxi, r.mass_drift, r.pin, r.boundary});
  }
  return s;
}

void write_series(const std::string& path, const SeriesTable& table) {
  if (table.rows.empty()) throw IoError("write_series: no records to write to " + path);
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw IoError("write_series: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  write_text(path, out);
}

void write_series(const std::string& path, const DirectTrajectory& traj) {
  write_series(path, series_table(traj));
}

void write_series(const std::string& path, const RescaledTrajectory& traj) {
  write_series(path, series_table(traj));
}

SeriesTable read_series(const std::string& path) {
  std::istringstream in(read_text(path));
  SeriesTable s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (s.columns.empty()) {
      for (auto c : cells) s.columns.emplace_back(trim(c));
      continue;
    }
    if (cells.size() != s.columns.size()) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(s.columns.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_double(c, path, line_no));
    s.rows.push_back(std::move(row));
  }
  if (s.columns.empty()) throw IoError(path + ": empty series file");
  return s;
}

void write_snapshot(const std::string& path, const Field& f, const SnapshotHeader& h) {
  std::string out = "# gkdv snapshot\n";
  auto put = [&](const char* key, const std::string& v) { out += std::string("# ") + key + " = " + v + "\n"; };
  put("N", std::to_string(f.grid.size()));
  put("D", format_double(f.grid.half_width()));
  put("n", std::to_string(h.n));
  put("eps", format_double(h.eps));
  put("t", format_double(h.t));
  if (h.tau) put("tau", format_double(*h.tau));
  if (h.L) put("L", format_double(*h.L));
  if (h.x_m) put("x_m", format_double(*h.x_m));
  if (h.xi0) put("xi0", format_double(*h.xi0));
  out += "x,u\n";
  for (int j = 0; j < f.size(); ++j) {
    out += format_double(f.grid.node(j));
    out += ',';
    out += format_double(f.values[j]);
    out += '\n';
  }
  write_text(path, out);
}

SnapshotFile read_snapshot(const std::string& path) {
  std::istringstream in(read_text(path));
  SnapshotHeader h;
  std::vector<double> u;
  bool have_n = false, have_D = false, have_N = false, columns = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(s.substr(1, eq - 1));
      const double v = parse_double(s.substr(eq + 1), path, line_no);
      if (key == "N") {
        h.N = static_cast<int>(v);
        have_N = true;
      } else if (key == "D") {
        h.D = v;
        have_D = true;
      } else if (key == "n") {
        h.n = static_cast<int>(v);
        have_n = true;
      } else if (key == "eps") {
        h.eps = v;
      } else if (key == "t") {
        h.t = v;
      } else if (key == "tau") {
        h.tau = v;
      } else if (key == "L") {
        h.L = v;
      } else if (key == "x_m") {
        h.x_m = v;
      } else if (key == "xi0") {
        h.xi0 = v;
      }
      continue;
    }
    if (!columns) {
      columns = true;  // x,u header
      continue;
    }
    const auto cells = split(s, ',');
    if (cells.size() != 2) throw IoError(path + ":" + std::to_string(line_no) + ": expected x,u");
    u.push_back(parse_double(cells[1], path, line_no));
  }
  if (!have_N || !have_D || !have_n) throw IoError(path + ": snapshot header lacks N, D or n");
  if (static_cast<int>(u.size()) != h.N) {
    throw IoError(path + ": expected " + std::to_string(h.N) + " samples, found " +
                  std::to_string(u.size()));
  }
  return {h, Field(make_grid(h.N, h.D), std::move(u))};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to " + path + " failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace gkdv
