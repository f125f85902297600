#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/direct.hpp"
#include "gkdv/model.hpp"

namespace gkdv {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open index range [begin, end) into a series.
struct FitWindow {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

/// The last count samples of a series of length n (all of them if n < count).
FitWindow window_last(std::size_t n, std::size_t count = 1000);
/// Samples with t > t_min.
FitWindow window_after(std::span<const double> t, double t_min);
/// Samples with lo < x < hi.
FitWindow window_between(std::span<const double> x, double lo, double hi);

struct FitResult {
  std::vector<std::pair<std::string, double>> params;
  double residual_l2 = 0;
  double residual_linf = 0;
  std::optional<double> correlation;  // Pearson r, linear fits only
  std::optional<double> stddev;       // slope standard deviation, linear fits only
  FitWindow window;
  int iterations = 0;
  std::vector<std::string> flags;

  double get(const std::string& name) const;
  bool has(const std::string& name) const;
  void set(const std::string& name, double value);
};

// ---------------------------------------------------------------------------

enum class NormKind { l2ux, linf };

const char* to_string(NormKind k);

struct ScalingSeries {
  std::vector<double> t;
  std::vector<double> L;
};

/// L(t) from a norm series: (N0/N)^{1/(2/n+1/2)} for ||u_x||_2 and
/// (N0/N)^{n/2} for ||u||_inf, so that the rescaled norm stays at its
/// initial value.
ScalingSeries scaling_from_norms(std::span<const double> t, std::span<const double> norm,
                                 NormKind kind, const ModelParams& p);
ScalingSeries scaling_from_norms(const DirectTrajectory& traj, NormKind kind, const ModelParams& p);

/// Least squares y = slope x + intercept with Pearson r and the standard
/// deviation of the slope.
FitResult fit_linear(std::span<const double> x, std::span<const double> y);
FitResult fit_linear(std::span<const double> x, std::span<const double> y, FitWindow w);

struct NelderMeadOptions {
  int max_iter = 10000;
  double tol = 1e-10;
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Downhill simplex minimization from an explicit initial simplex (dim + 1
/// vertices). Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& opts = {});

/// Fits ln y = alpha ln(t* - t) + kappa over the window by Nelder-Mead in
/// (t*, kappa), or (t*, kappa, alpha) when alpha is not given. Params: t_star,
/// kappa, alpha. Throws FitError when the simplex does not converge.
FitResult fit_blowup_time(std::span<const double> t, std::span<const double> y,
                          std::optional<double> alpha, FitWindow w,
                          const NelderMeadOptions& opts = {});
FitResult fit_blowup_time(std::span<const double> t, std::span<const double> y,
                          std::optional<double> alpha);

/// L = m t + L0 on the window; t_star = -L0/m. A non-negative slope is
/// flagged ("no-blowup") and t_star is NaN.
FitResult fit_L_linear(std::span<const double> t, std::span<const double> L, FitWindow w);

/// ln L = gamma ln(t* - t) + C, excluding samples with ln(t* - t) below the
/// saturation floor. The default window is the last 1000 samples.
FitResult fit_L_powerlaw(std::span<const double> t, std::span<const double> L, double t_star,
                         double saturation_floor = -8.0);
FitResult fit_L_powerlaw(std::span<const double> t, std::span<const double> L, double t_star,
                         FitWindow w, double saturation_floor = -8.0);

enum class XmMode { powerlaw, linear_in_L };

/// powerlaw: ln x_m = gamma2 ln(t* - t) + ln C2 (params gamma2, C2);
/// linear_in_L: x_m = gamma L + x_m0 (params gamma, xm0, the blow-up position).
FitResult fit_xm(std::span<const double> x_m, std::span<const double> abscissa, XmMode mode,
                 FitWindow w, double t_star = 0);

struct EpsilonLawResult {
  FitResult exponential;  // ln(t*/t_c) = gamma eps + delta; params gamma, delta, t_star0
  FitResult algebraic;    // ln(t* - t_c) = slope ln eps + intercept
};

EpsilonLawResult fit_epsilon_law(std::span<const double> eps, std::span<const double> t_star,
                                 double t_c);

/// Expected exponents of the blow-up laws. For n = 4: L ~ (t* - t), as
/// observed for the perturbed soliton (||u||_inf ~ (t* - t)^{-1/2}); for n > 4:
/// L ~ (t* - t)^{1/3} from exponential decay of L in tau.
struct BlowupExponents {
  double L = 0;
  double linf = 0;
  double l2ux_sq = 0;
};

BlowupExponents blowup_exponents(const ModelParams& p);

}  // namespace gkdv
