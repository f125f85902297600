#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gkdv/model.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

struct Irk4Config {
  double h = 1e-3;
  double newton_tol = 1e-15;  // max change of stage coefficients, scaled by 1/N
  int newton_max_iter = 50;
  double stop_delta = 1e-3;
  bool dealias = false;

  void validate() const;
};

/// Simplified Newton did not converge within newton_max_iter iterations. Near
/// blow-up this is the expected way for the direct solver to stop.
class NewtonFailed : public std::runtime_error {
 public:
  NewtonFailed(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// Two-stage Gauss-Legendre (order 4) stepper for u_hat' = L u_hat + F(u_hat)
/// on the half spectrum. The stage equations are solved by simplified Newton
/// iteration with the diagonal linear symbol as Jacobian, which reduces each
/// iteration to an independent 2x2 complex solve per wavenumber.
class Irk4Stepper {
 public:
  Irk4Stepper(const Grid& g, const ModelParams& p, const Irk4Config& cfg);

  /// Advances state by one step in place. Throws NewtonFailed and leaves state
  /// untouched if the stage iteration does not converge.
  void step(std::vector<Complex>& state);

  int last_iterations() const { return last_iterations_; }
  GkdvOperator& op() { return op_; }
  const Irk4Config& config() const { return cfg_; }

 private:
  Irk4Config cfg_;
  GkdvOperator op_;
  // per-mode inverse of I - h A L, row major
  std::vector<Complex> m11_, m12_, m21_, m22_;
  std::vector<Complex> y1_, y2_, f1_, f2_;
  int last_iterations_ = 0;
};

/// Single step on a spectral state (convenience wrapper around Irk4Stepper).
std::vector<Complex> irk4_step(const std::vector<Complex>& state, const Grid& g,
                               const Irk4Config& cfg, const ModelParams& p);

enum class StopReason { completed, delta_exceeded, newton_failed };

const char* to_string(StopReason r);

struct DirectRecord {
  double t = 0;
  Invariants inv;
  double delta = 0;
  double tail = 0;
  double x_max = 0;  // location of the maximum of u
  int iterations = 0;
};

struct Snapshot {
  double t = 0;
  double tau = 0;
  Field field;
  double L = 1;    // rescaled runs: scale and frame origin of field
  double x_m = 0;
};

struct DirectOptions {
  std::vector<double> snapshot_times;
  int record_stride = 1;
  /// Locate the maximum of the trigonometric interpolant instead of the grid
  /// argmax; linf then holds the interpolant's extreme value.
  bool refine_max = false;
  /// Time of u0; a restart from a snapshot continues the clock from here.
  double t_start = 0;
};

struct DirectTrajectory {
  std::vector<DirectRecord> records;
  std::vector<Snapshot> snapshots;
  StopReason stop = StopReason::completed;
  std::string message;
  Field final_state;  // last reliable state
  double final_time = 0;
  long steps = 0;
};

/// Integrates from t = opts.t_start to T with the constant step cfg.h. Stops early when
/// the energy indicator exceeds cfg.stop_delta (the offending step is dropped)
/// or when the Newton iteration fails.
DirectTrajectory run_direct(const Field& u0, const Irk4Config& cfg, const ModelParams& p,
                            double T, const DirectOptions& opts = {});

/// Grid argmax location, optionally refined by a parabola through the three
/// neighbouring nodes.
double locate_max(const Grid& g, std::span<const double> u, int argmax, bool refine);

}  // namespace gkdv
