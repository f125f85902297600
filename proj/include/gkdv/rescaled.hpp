#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkdv/direct.hpp"
#include "gkdv/model.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

/// Closure used to determine a = (ln L)_tau.
enum class Closure { l2ux, linf };

const char* to_string(Closure c);
Closure closure_from_string(const std::string& s);

/// ||U_xi||_2 is (numerically) zero, so the l2ux closure is undefined.
class DegenerateField : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |U_xixi(xi0)| fell below the curvature floor; the maximum is no longer
/// pinned at xi0.
class SingularCurvature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a = 2n / ((n+1)(n+4) ||U_xi||^2) * int U^{n+1} U_xixixi, keeping ||U_xi||_2 fixed.
double compute_a(const Field& U, const ModelParams& p);

/// a = (n eps^2 / 2) U_xixixi(xi0) / U(xi0), keeping U(xi0) fixed.
double compute_a_linf(const Field& U, const ModelParams& p, double xi0);

/// v = -a xi0 + U(xi0)^n + eps^2 U_xixixixi(xi0) / U_xixi(xi0). Point values are
/// taken at the node nearest xi0. Throws SingularCurvature when
/// |U_xixi(xi0)| < curvature_floor * max|U_xixi|.
double compute_v(const Field& U, double a, double xi0, const ModelParams& p,
                 double curvature_floor = 1e-8);

/// -a(2U/n + xi U_xi) - v U_xi + U^n U_xi + eps^2 U_xixixi.
Field ode_residual(const Field& U, double a_inf, double v_inf, const ModelParams& p);

/// L^{-(4/n+1)} int (eps^2/2 U_xi^2 - U^{n+2}/((n+1)(n+2))) dxi.
double rescaled_energy(const Field& U, double L, const ModelParams& p);

/// Cox-Matthews ETDRK4 for y' = L y + N(y) with diagonal L. The coefficient
/// functions are averaged over a circular contour around each h*L_k, with a
/// Taylor expansion for |h L_k| below taylor_below.
class Etd4Stepper {
 public:
  using Nonlinear = std::function<void(std::span<const Complex>, std::span<Complex>)>;

  struct Options {
    int contour_points = 32;
    double contour_radius = 1.0;
    double taylor_below = 1e-4;
  };

  Etd4Stepper(std::span<const Complex> linear, double h);
  Etd4Stepper(std::span<const Complex> linear, double h, const Options& opts);

  double h() const { return h_; }

  /// One step in place. n_start, if non-empty, holds N(state) already
  /// evaluated by the caller (saves one evaluation per step).
  void step(std::vector<Complex>& state, const Nonlinear& nonlinear,
            std::span<const Complex> n_start = {});

  // coefficient arrays, exposed for testing
  std::span<const Complex> e() const { return e_; }
  std::span<const Complex> e2() const { return e2_; }
  std::span<const Complex> q() const { return q_; }
  std::span<const Complex> f1() const { return f1_; }
  std::span<const Complex> f2() const { return f2_; }
  std::span<const Complex> f3() const { return f3_; }

 private:
  double h_;
  std::vector<Complex> e_, e2_, q_, f1_, f2_, f3_;
  std::vector<Complex> na_, nb_, nc_, nu_, sa_, sb_, sc_;
};

/// Running scales of the rescaled frame.
struct ScaleState {
  double ln_l = 0;  // ln L
  double t = 0;     // physical time
  double x_m = 0;   // frame origin, x = x_m + L xi
  double a = 0;
  double v = 0;
};

/// Trapezoid update over one tau step from (a, v) at the old state to
/// (a_new, v_new) at the new one.
void accumulate_scales(ScaleState& s, double a_new, double v_new, double h_tau);

struct RescaledConfig {
  double h = 1e-3;  // tau step
  Closure closure = Closure::l2ux;
  double xi0 = 0;
  double curvature_floor = 1e-8;
  double stop_energy_drift = 7e-2;
  double stop_mass_drift = 1e-3;
  double stop_boundary = 1e-3;  // max |U| on the outer 1% of the domain
  double stop_pin = 1e-2;       // |U_xi(xi0)| / max|U_xi|
  bool dealias = false;
  Etd4Stepper::Options etd;

  void validate() const;
};

/// Right-hand side of the rescaled equation on the half spectrum, together
/// with the closure values and pinning diagnostics of the evaluated state.
/// v is chosen so that the discrete right-hand side leaves U_xi(xi0)
/// unchanged; at a resolved flat maximum it agrees with compute_v.
class RescaledOperator {
 public:
  struct Eval {
    double a = 0;
    double v = 0;
    double l2_uxi = 0;  // ||U_xi||_2
    double pin = 0;     // |U_xi(xi0)| / max|U_xi|
  };

  RescaledOperator(const Grid& g, const ModelParams& p, const RescaledConfig& cfg);

  const Grid& grid() const { return grid_; }
  int pin_index() const { return pin_; }
  std::span<const Complex> linear_symbol() const { return linear_; }

  /// Closures of state; out (if non-empty) receives N(U) with these closures.
  Eval evaluate(std::span<const Complex> state, std::span<Complex> out = {});

  void to_physical(std::span<const Complex> state, std::span<double> out) const;
  void to_spectrum(std::span<const double> values, std::span<Complex> out) const;

 private:
  double point_derivative(std::span<const Complex> state, int order) const;

  Grid grid_;
  ModelParams params_;
  Closure closure_;
  double curvature_floor_;
  bool dealias_;
  int pin_;
  double xi0_;
  RealTransform fft_;
  std::vector<Complex> linear_, ik_, ik3_;
  std::array<std::vector<Complex>, 4> point_weights_;  // orders 1..4 at the pinned node
  std::vector<double> curv_weights_;
  std::vector<double> xi_, u_, ux_, uxxx_, w_;
  std::vector<Complex> work_;
};

enum class RescaledStop {
  completed,
  energy_drift,
  mass_drift,
  boundary,
  pin_lost,
  singular_curvature,
  non_finite
};

const char* to_string(RescaledStop r);

struct RescaledRecord {
  double tau = 0;
  double t = 0;
  double L = 1;
  double a = 0;
  double v = 0;
  double x_m = 0;
  double x_max = 0;     // physical position of the pinned maximum, x_m + L xi0
  double l2_uxi = 0;    // ||U_xi||_2
  double energy = 0;    // rescaled energy (equals the physical one)
  double mass = 0;      // physical mass
  double linf = 0;      // physical max |u| = L^{-2/n} max|U|
  double l2ux = 0;      // physical ||u_x||_2
  double delta = 0;     // energy drift
  double mass_drift = 0;
  double tail = 0;
  double pin = 0;
  double boundary = 0;
};

struct RescaleState {
  Field U{Grid(4, 1.0)};
  double tau = 0;
  ScaleState scales;
  double xi0 = 0;

  double L() const;
};

struct RescaledOptions {
  std::vector<double> snapshot_taus;
  int record_stride = 1;
};

struct RescaledTrajectory {
  std::vector<RescaledRecord> records;
  std::vector<Snapshot> snapshots;
  RescaledStop stop = RescaledStop::completed;
  std::string message;
  RescaleState final_state;  // last reliable state
  long steps = 0;
};

/// Snaps xi0 to the nearest node and translates u0 spectrally so that its
/// (refined) maximum sits exactly on that node. The returned state carries the
/// translation in x_m, so x = x_m + xi recovers the original coordinates.
RescaleState prepare_rescaled(const Field& u0, double xi0);

RescaledTrajectory run_rescaled(const RescaleState& start, const RescaledConfig& cfg,
                                const ModelParams& p, double tau_end,
                                const RescaledOptions& opts = {});

/// Convenience overload: prepare_rescaled(u0, cfg.xi0) followed by the run.
RescaledTrajectory run_rescaled(const Field& u0, const RescaledConfig& cfg, const ModelParams& p,
                                double tau_end, const RescaledOptions& opts = {});

/// u(x) = L^{-2/n} U((x - x_m)/L) on the target grid by cubic spline. Nodes
/// whose xi falls outside the rescaled domain are set to 0 and flagged.
struct PhysicalFrame {
  Field field;
  std::vector<char> inside;
};

PhysicalFrame to_physical_frame(const RescaleState& s, const ModelParams& p, const Grid& target);

}  // namespace gkdv
