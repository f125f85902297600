#include "gkdv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gkdv {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_plain(std::string_view s) {
  s = trim(s);
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  const double v = parse_number(s);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw std::invalid_argument("not an integer: '" + std::string(trim(s)) + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(parse_number(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"mode", [](RunConfig& c, std::string_view v) { c.mode = run_mode_from_string(std::string(trim(v))); }},
      {"model.n", [](RunConfig& c, std::string_view v) { c.model.n = parse_int(v); }},
      {"model.eps", [](RunConfig& c, std::string_view v) { c.model.eps = parse_number(v); }},
      {"grid.N", [](RunConfig& c, std::string_view v) { c.N = parse_int(v); }},
      {"grid.D", [](RunConfig& c, std::string_view v) { c.D = parse_number(v); }},
      {"initial.kind",
       [](RunConfig& c, std::string_view v) {
         const auto s = trim(v);
         if (s == "soliton-perturbation" || s == "soliton") {
           c.initial.kind = InitialKind::soliton_perturbation;
         } else if (s == "sech2") {
           c.initial.kind = InitialKind::sech2;
         } else if (s == "file") {
           c.initial.kind = InitialKind::file;
         } else {
           throw std::invalid_argument("unknown initial data kind '" + std::string(s) + "'");
         }
       }},
      {"initial.sigma", [](RunConfig& c, std::string_view v) { c.initial.sigma = parse_number(v); }},
      {"initial.c", [](RunConfig& c, std::string_view v) { c.initial.c = parse_number(v); }},
      {"initial.x0", [](RunConfig& c, std::string_view v) { c.initial.x0 = parse_number(v); }},
      {"initial.beta", [](RunConfig& c, std::string_view v) { c.initial.beta = parse_number(v); }},
      {"initial.path", [](RunConfig& c, std::string_view v) { c.initial.path = std::string(trim(v)); }},
      {"stepping.T", [](RunConfig& c, std::string_view v) { c.stepping.T = parse_number(v); }},
      {"stepping.tau_end", [](RunConfig& c, std::string_view v) { c.stepping.tau_end = parse_number(v); }},
      {"stepping.Nt", [](RunConfig& c, std::string_view v) { c.stepping.Nt = parse_number(v); }},
      {"stepping.newton_tol", [](RunConfig& c, std::string_view v) { c.stepping.newton_tol = parse_number(v); }},
      {"stepping.newton_max_iter",
       [](RunConfig& c, std::string_view v) { c.stepping.newton_max_iter = parse_int(v); }},
      {"stepping.stop_delta", [](RunConfig& c, std::string_view v) { c.stepping.stop_delta = parse_number(v); }},
      {"stepping.dealias", [](RunConfig& c, std::string_view v) { c.stepping.dealias = parse_bool(v); }},
      {"rescale.xi0", [](RunConfig& c, std::string_view v) { c.rescale.xi0 = parse_number(v); }},
      {"rescale.closure",
       [](RunConfig& c, std::string_view v) { c.rescale.closure = closure_from_string(std::string(trim(v))); }},
      {"rescale.stop_energy_drift",
       [](RunConfig& c, std::string_view v) { c.rescale.stop_energy_drift = parse_number(v); }},
      {"rescale.stop_mass_drift",
       [](RunConfig& c, std::string_view v) { c.rescale.stop_mass_drift = parse_number(v); }},
      {"rescale.stop_boundary", [](RunConfig& c, std::string_view v) { c.rescale.stop_boundary = parse_number(v); }},
      {"rescale.stop_pin", [](RunConfig& c, std::string_view v) { c.rescale.stop_pin = parse_number(v); }},
      {"rescale.curvature_floor",
       [](RunConfig& c, std::string_view v) { c.rescale.curvature_floor = parse_number(v); }},
      {"rescale.contour_points",
       [](RunConfig& c, std::string_view v) { c.rescale.etd.contour_points = parse_int(v); }},
      {"rescale.contour_radius",
       [](RunConfig& c, std::string_view v) { c.rescale.etd.contour_radius = parse_number(v); }},
      {"output.directory", [](RunConfig& c, std::string_view v) { c.output.directory = std::string(trim(v)); }},
      {"output.snapshots", [](RunConfig& c, std::string_view v) { c.output.snapshots = parse_list(v); }},
      {"output.stride", [](RunConfig& c, std::string_view v) { c.output.stride = parse_int(v); }},
      {"output.refine_max", [](RunConfig& c, std::string_view v) { c.output.refine_max = parse_bool(v); }},
      {"fit.series", [](RunConfig& c, std::string_view v) { c.fit.series = std::string(trim(v)); }},
      {"fit.window", [](RunConfig& c, std::string_view v) { c.fit.window = parse_int(v); }},
      {"fit.t_min", [](RunConfig& c, std::string_view v) { c.fit.t_min = parse_number(v); }},
      {"fit.L_t_min", [](RunConfig& c, std::string_view v) { c.fit.L_t_min = parse_number(v); }},
      {"fit.saturation_floor", [](RunConfig& c, std::string_view v) { c.fit.saturation_floor = parse_number(v); }},
      {"fit.xm_L_max", [](RunConfig& c, std::string_view v) { c.fit.xm_L_max = parse_number(v); }},
      {"sweep.eps", [](RunConfig& c, std::string_view v) { c.sweep.eps = parse_list(v); }},
      {"sweep.workers", [](RunConfig& c, std::string_view v) { c.sweep.workers = parse_int(v); }},
  };
  return table;
}

const Setter* find_setter(std::string_view key) {
  for (const auto& [k, s] : setters()) {
    if (k == key) return &s;
  }
  return nullptr;
}

void apply(RunConfig& cfg, std::string_view key, std::string_view value, int line,
           std::set<std::string>& seen) {
  auto where = [&]() {
    std::ostringstream os;
    if (line > 0) {
      os << "line " << line << ", ";
    } else {
      os << "override, ";
    }
    os << "key '" << key << "': ";
    return os.str();
  };
  const Setter* s = find_setter(key);
  if (!s) throw ConfigError(where() + "unknown key", line, std::string(key));
  if (line > 0 && !seen.insert(std::string(key)).second) {
    throw ConfigError(where() + "repeated key", line, std::string(key));
  }
  try {
    (*s)(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where() + e.what(), line, std::string(key));
  }
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view text, int line) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    std::ostringstream os;
    if (line > 0) {
      os << "line " << line << ": expected 'key = value'";
    } else {
      os << "override '" << text << "': expected key=value";
    }
    throw ConfigError(os.str(), line, "");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

}  // namespace

double parse_number(std::string_view s) {
  s = trim(s);
  const auto caret = s.find('^');
  if (caret == std::string_view::npos) return parse_plain(s);
  // a^b or m*a^b
  std::string_view lhs = s.substr(0, caret);
  double mult = 1.0;
  const auto star = lhs.find('*');
  if (star != std::string_view::npos) {
    mult = parse_plain(lhs.substr(0, star));
    lhs = lhs.substr(star + 1);
  }
  return mult * std::pow(parse_plain(lhs), parse_plain(s.substr(caret + 1)));
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::direct: return "direct";
    case RunMode::rescaled: return "rescaled";
    case RunMode::postprocess: return "postprocess";
    case RunMode::sweep: return "sweep";
    case RunMode::soliton_test: return "soliton-test";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "direct") return RunMode::direct;
  if (s == "rescaled") return RunMode::rescaled;
  if (s == "postprocess") return RunMode::postprocess;
  if (s == "sweep") return RunMode::sweep;
  if (s == "soliton-test") return RunMode::soliton_test;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::soliton_perturbation: return "soliton-perturbation";
    case InitialKind::sech2: return "sech2";
    case InitialKind::file: return "file";
  }
  return "unknown";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, s] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

Irk4Config RunConfig::irk4() const {
  Irk4Config c;
  if (stepping.T && stepping.Nt) c.h = *stepping.T / *stepping.Nt;
  c.newton_tol = stepping.newton_tol;
  c.newton_max_iter = stepping.newton_max_iter;
  c.stop_delta = stepping.stop_delta;
  c.dealias = stepping.dealias;
  return c;
}

RescaledConfig RunConfig::rescaled() const {
  RescaledConfig c = rescale;
  if (stepping.tau_end && stepping.Nt) c.h = *stepping.tau_end / *stepping.Nt;
  c.dealias = stepping.dealias;
  return c;
}

Grid RunConfig::grid() const { return Grid(N, D); }

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("invalid configuration: " + msg); };
  if (model.n < 1) fail("model.n must be a positive integer");
  if (!(model.eps > 0) || !std::isfinite(model.eps)) fail("model.eps must be positive");
  if (N < 4 || N % 2 != 0) fail("grid.N must be even and >= 4");
  if (!(D > 0) || !std::isfinite(D)) fail("grid.D must be positive");
  if (output.stride < 1) fail("output.stride must be >= 1");
  if (!(stepping.newton_tol > 0)) fail("stepping.newton_tol must be positive");
  if (stepping.newton_max_iter < 1) fail("stepping.newton_max_iter must be >= 1");
  if (!(stepping.stop_delta > 0)) fail("stepping.stop_delta must be positive");
  if (stepping.Nt && !(*stepping.Nt >= 1)) fail("stepping.Nt must be >= 1");
  if (stepping.T && !(*stepping.T > 0)) fail("stepping.T must be positive");
  if (stepping.tau_end && !(*stepping.tau_end > 0)) fail("stepping.tau_end must be positive");
  if (initial.kind == InitialKind::soliton_perturbation && !(initial.c > 0)) {
    fail("initial.c must be positive");
  }
  if (initial.kind == InitialKind::sech2 && !(initial.beta > 0)) fail("initial.beta must be positive");
  if (initial.kind == InitialKind::file && initial.path.empty()) {
    fail("initial.path is required for initial.kind = file");
  }
  if (fit.window < 3) fail("fit.window must be >= 3");
  switch (mode) {
    case RunMode::direct:
    case RunMode::soliton_test:
      if (!stepping.T || !stepping.Nt) fail("stepping.T and stepping.Nt are required");
      break;
    case RunMode::rescaled:
      if (!stepping.tau_end || !stepping.Nt) fail("stepping.tau_end and stepping.Nt are required");
      if (model.n < 2) fail("rescaled mode needs model.n >= 2");
      try {
        rescaled().validate();
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      break;
    case RunMode::postprocess:
      if (fit.series.empty()) fail("fit.series is required in postprocess mode");
      if (model.n < 4) fail("postprocess fits need model.n >= 4");
      break;
    case RunMode::sweep:
      if (sweep.eps.size() < 3) fail("sweep.eps needs at least 3 values");
      for (double e : sweep.eps) {
        if (!(e > 0)) fail("sweep.eps values must be positive");
      }
      if (!stepping.T || !stepping.Nt) fail("stepping.T and stepping.Nt are required");
      if (model.n < 4) fail("sweep fits need model.n >= 4");
      if (sweep.workers < 0) fail("sweep.workers must be >= 0");
      break;
  }
  if (mode == RunMode::soliton_test && initial.kind != InitialKind::soliton_perturbation) {
    fail("soliton-test mode needs initial.kind = soliton-perturbation");
  }
  if (mode == RunMode::soliton_test && initial.sigma != 1.0) {
    fail("soliton-test mode compares against the exact soliton and needs initial.sigma = 1");
  }
}

RunConfig parse_config(std::string_view text) { return parse_config(text, {}); }

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto [k, v] = split_assignment(line, line_no);
      apply(cfg, k, v, line_no, seen);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (const auto& o : overrides) {
    const auto [k, v] = split_assignment(o, 0);
    apply(cfg, k, v, 0, seen);
  }
  cfg.validate();
  return cfg;
}

}  // namespace gkdv
