#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "gkdv/config.hpp"
#include "gkdv/io.hpp"
#include "gkdv/run.hpp"

using namespace gkdv;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per call
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gkdv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::string soliton_run = R"(
mode = direct
model.n = 4
model.eps = 1
grid.N = 2^9
grid.D = 10
initial.kind = soliton-perturbation
initial.x0 = -3
stepping.T = 0.4
stepping.Nt = 200
output.snapshots = 0.2
)";

}  // namespace

TEST_CASE("series round trip is bit exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-1, 1);
  SeriesTable t{{"a", "b", "c"}, {}};
  for (int i = 0; i < 50; ++i) {
    t.rows.push_back({ud(rng) * std::pow(10.0, i % 30 - 15), ud(rng), static_cast<double>(i)});
  }
  t.rows.push_back({std::numeric_limits<double>::denorm_min(), -0.0, 1e308});
  const fs::path dir = scratch("series");
  write_series((dir / "s.csv").string(), t);
  const SeriesTable back = read_series((dir / "s.csv").string());
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(back.rows[i][c] == t.rows[i][c]);
      CHECK(std::signbit(back.rows[i][c]) == std::signbit(t.rows[i][c]));
    }
  }
  CHECK(back.column("b") == t.column("b"));
  CHECK_THROWS_AS(back.column("z"), IoError);
}

TEST_CASE("empty series is an error and creates no file") {
  const fs::path dir = scratch("empty");
  const fs::path file = dir / "s.csv";
  CHECK_THROWS_AS(write_series(file.string(), SeriesTable{{"t"}, {}}), IoError);
  CHECK_FALSE(fs::exists(file));
}

TEST_CASE("snapshot round trip") {
  const Grid g = make_grid(64, 2.0);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x) / 3; });
  SnapshotHeader h;
  h.n = 5;
  h.eps = 0.1;
  h.t = 0.125;
  h.tau = 3.5;
  h.L = 0.25;
  const fs::path dir = scratch("snapshot");
  const std::string path = (dir / "s.txt").string();
  write_snapshot(path, f, h);
  const SnapshotFile back = read_snapshot(path);
  CHECK(back.header.N == 64);
  CHECK(back.header.D == 2.0);
  CHECK(back.header.n == 5);
  CHECK(back.header.eps == 0.1);
  CHECK(back.header.t == 0.125);
  CHECK(*back.header.tau == 3.5);
  CHECK(*back.header.L == 0.25);
  CHECK_FALSE(back.header.x_m.has_value());
  CHECK(back.field.values == f.values);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.txt").string()), IoError);
}

TEST_CASE("identical runs write byte-identical files") {
  const RunConfig base = parse_config(soliton_run);
  std::vector<std::string> texts[2];
  for (int k = 0; k < 2; ++k) {
    RunConfig c = base;
    c.output.directory = scratch("rerun" + std::to_string(k)).string();
    const RunOutcome out = run(c);
    CHECK(out.status == ExitStatus::clean);
    for (const auto& f : out.files) texts[k].push_back(read_text((fs::path(c.output.directory) / f).string()));
  }
  REQUIRE(texts[0].size() >= 4);
  CHECK(texts[0] == texts[1]);
}

TEST_CASE("restart from a snapshot reproduces the unbroken run") {
  RunConfig full = parse_config(soliton_run);
  full.output.directory = scratch("full").string();
  run(full);

  const std::string snap = (fs::path(full.output.directory) / "snapshot_0000.txt").string();
  RunConfig resume = parse_config(soliton_run, {"initial.kind=file", "initial.path=" + snap});
  resume.output.directory = scratch("resume").string();
  resume.output.snapshots.clear();
  const RunOutcome out = run(resume);
  CHECK(out.status == ExitStatus::clean);

  const SnapshotFile a = read_snapshot((fs::path(full.output.directory) / "final.txt").string());
  const SnapshotFile b = read_snapshot((fs::path(resume.output.directory) / "final.txt").string());
  CHECK(b.header.t == doctest::Approx(0.4));
  double err = 0;
  for (int j = 0; j < a.field.size(); ++j) err = std::max(err, std::abs(a.field.values[j] - b.field.values[j]));
  CHECK(err < 1e-12);

  // the restarted series continues the clock
  const SeriesTable s = read_series((fs::path(resume.output.directory) / "series.csv").string());
  CHECK(s.column("t").front() == doctest::Approx(0.2));
}
