#include <doctest.h>

#include <filesystem>
#include <string>

#include "gkdv/config.hpp"
#include "gkdv/io.hpp"

using namespace gkdv;

namespace {

const std::string minimal = R"(
# direct run
mode = direct
model.n = 4
model.eps = 1
stepping.T = 1
stepping.Nt = 100
)";

}  // namespace

TEST_CASE("defaults fill a minimal document") {
  const RunConfig c = parse_config(minimal);
  CHECK(c.mode == RunMode::direct);
  CHECK(c.N == 4096);
  CHECK(c.D == 10.0);
  CHECK(c.stepping.stop_delta == 1e-3);
  CHECK(c.output.stride == 1);
  CHECK_FALSE(c.stepping.dealias);
  CHECK(c.rescale.closure == Closure::l2ux);
  CHECK(c.irk4().h == doctest::Approx(0.01));
}

TEST_CASE("numbers") {
  CHECK(parse_number("2^14") == 16384);
  CHECK(parse_number(" 1e5 ") == 1e5);
  CHECK(parse_number("2.5e-3") == 2.5e-3);
  CHECK(parse_number("6*10^6") == 6e6);
  CHECK(parse_number("-0.5") == -0.5);
  CHECK_THROWS(parse_number("abc"));
  CHECK_THROWS(parse_number("2^"));
}

TEST_CASE("parse errors carry line and key") {
  try {
    parse_config(minimal + "grid.M = 3\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 8);
    CHECK(e.key() == "grid.M");
  }
  try {
    parse_config(minimal + "model.n = 5\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "model.n");
  }
  CHECK_THROWS_AS(parse_config("model.n 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(minimal + "grid.N = many\n"), ConfigError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(parse_config(minimal, {"model.eps=-0.1"}), ValidationError);
  CHECK_THROWS_AS(parse_config(minimal, {"grid.N=1001"}), ValidationError);
  CHECK_THROWS_AS(parse_config(minimal, {"grid.D=0"}), ValidationError);
  CHECK_THROWS_AS(parse_config("mode = direct\nmodel.n = 4\nmodel.eps = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(minimal, {"mode=sweep", "sweep.eps=0.1,0.05"}), ValidationError);
  CHECK_THROWS_AS(parse_config(minimal, {"mode=rescaled", "model.n=1", "stepping.tau_end=1"}),
                  ValidationError);
  try {
    parse_config(minimal, {"model.eps=-0.1"});
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("eps") != std::string::npos);
  }
}

TEST_CASE("overrides replace document values") {
  const RunConfig c = parse_config(minimal, {"grid.N=2^10", "output.snapshots=0.1,0.5"});
  CHECK(c.N == 1024);
  REQUIRE(c.output.snapshots.size() == 2);
  CHECK(c.output.snapshots[1] == 0.5);
  CHECK_THROWS_AS(parse_config(minimal, {"nonsense=1"}), ConfigError);
  CHECK_THROWS_AS(parse_config(minimal, {"grid.N"}), ConfigError);
}

TEST_CASE("shipped presets") {
  const std::filesystem::path dir = GKDV_PRESET_DIR;
  const RunConfig s5 = parse_config(read_text((dir / "sech2-n5-eps0.1.conf").string()));
  CHECK(s5.mode == RunMode::direct);
  CHECK(s5.model.n == 5);
  CHECK(s5.model.eps == 0.1);
  CHECK(s5.N == 16384);
  CHECK(s5.D == 5.0);
  CHECK(*s5.stepping.Nt == 1e5);
  CHECK(*s5.stepping.T == 2.5);
  CHECK(s5.initial.kind == InitialKind::sech2);

  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".conf") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(read_text(entry.path().string())));
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("every documented key is accepted") {
  CHECK(config_keys().size() > 30);
  for (const auto& k : config_keys()) {
    const bool dotted = k.find('.') != std::string::npos;
    CHECK((dotted || k == "mode"));
  }
}
