#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gkdv/direct.hpp"
#include "gkdv/model.hpp"
#include "gkdv/rescaled.hpp"

namespace gkdv {

/// Malformed document: carries the line number (0 for --set overrides) and key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Well-formed document whose values violate a constraint.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { direct, rescaled, postprocess, sweep, soliton_test };

const char* to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

enum class InitialKind { soliton_perturbation, sech2, file };

const char* to_string(InitialKind k);

struct InitialData {
  InitialKind kind = InitialKind::soliton_perturbation;
  double sigma = 1.0;  // soliton multiplier
  double c = 1.0;      // soliton speed
  double x0 = 0.0;     // soliton centre
  double beta = 1.0;   // sech^2 amplitude
  std::string path;    // snapshot file
};

struct Stepping {
  std::optional<double> T;
  std::optional<double> tau_end;
  std::optional<double> Nt;
  double newton_tol = Irk4Config{}.newton_tol;
  int newton_max_iter = Irk4Config{}.newton_max_iter;
  double stop_delta = Irk4Config{}.stop_delta;
  bool dealias = false;
};

struct OutputOptions {
  std::string directory = ".";
  std::vector<double> snapshots;  // t for direct runs, tau for rescaled runs
  int stride = 1;
  bool refine_max = false;
};

struct FitOptions {
  std::string series;  // series CSV for postprocess
  int window = 1000;
  std::optional<double> t_min;  // fit ln||u||_inf with free alpha over t > t_min
  double L_t_min = 2.0;         // window of the linear L fit (n = 4)
  double saturation_floor = -8.0;
  std::optional<double> xm_L_max;  // x_m linear in L over L < xm_L_max (n > 4)
};

struct SweepOptions {
  std::vector<double> eps;
  int workers = 0;  // 0: GKDV_WORKERS or 1
};

struct RunConfig {
  RunMode mode = RunMode::direct;
  ModelParams model;
  int N = 1 << 12;
  double D = 10.0;
  InitialData initial;
  Stepping stepping;
  RescaledConfig rescale;
  OutputOptions output;
  FitOptions fit;
  SweepOptions sweep;

  Irk4Config irk4() const;
  RescaledConfig rescaled() const;
  Grid grid() const;
  /// Throws ValidationError naming the offending constraint.
  void validate() const;
};

/// Flat key = value document with dotted keys and # comments. Numbers accept
/// scientific notation and powers such as 2^14. Unknown or repeated keys are
/// rejected. The result is validated.
RunConfig parse_config(std::string_view text);

/// Applies parse_config's rules to key=value overrides on top of a document.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides);

/// Keys understood by parse_config, in documentation order.
const std::vector<std::string>& config_keys();

/// Numeric literal with optional a^b or a*b^c forms.
double parse_number(std::string_view s);

}  // namespace gkdv
