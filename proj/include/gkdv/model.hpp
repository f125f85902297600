#pragma once

#include <span>
#include <vector>

#include "gkdv/spectral.hpp"

namespace gkdv {

/// gKdV instance u_t + u^n u_x + eps^2 u_xxx = 0.
struct ModelParams {
  int n = 4;
  double eps = 1.0;

  /// Throws std::invalid_argument unless n >= 1 and eps > 0.
  void validate() const;
};

struct Invariants {
  double mass = 0;    // ||u||_2^2
  double energy = 0;  // int eps^2/2 u_x^2 - u^{n+2}/((n+1)(n+2))
  double linf = 0;    // max |u|
  double l2_ux = 0;   // ||u_x||_2
};

/// Q_c(x - x0) = ((n+1)(n+2)c/2 sech^2(sqrt(c) n (x-x0) / (2 eps)))^{1/n}.
/// Warns when the boundary values exceed 1e-12 of the peak, i.e. when the
/// profile is not periodic to working precision on this domain.
Field soliton(double c, double x0, const ModelParams& p, const Grid& g);

/// Pointwise soliton profile, no grid involved.
double soliton_profile(double c, double z, const ModelParams& p);

Invariants invariants(const Field& f, const ModelParams& p);

/// |E_t/E_0 - 1|, or |E_t - E_0| when |E_0| <= 1e-10.
double delta_indicator(double energy_now, double energy_initial);

/// Gradient catastrophe time of the dispersionless limit for u0 = beta sech^2 x.
double hopf_critical_time(double beta, const ModelParams& p);

/// Fourier-space split u_hat_t = L u_hat + F(u), both in FFT ordering over all
/// N modes. The Nyquist entries are zero (odd-order operators).
struct RhsSplit {
  std::vector<Complex> linear;     // i eps^2 k^3
  std::vector<Complex> nonlinear;  // -i k (u^{n+1})^ / (n+1)
};

RhsSplit rhs_split(const Field& f, const ModelParams& p);

/// Reusable evaluator of the gKdV right-hand side on the half spectrum. Owns
/// its FFT workspace; one instance per thread.
class GkdvOperator {
 public:
  GkdvOperator(const Grid& g, const ModelParams& p, bool dealias = false);

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  std::span<const Complex> linear_symbol() const { return linear_; }

  /// out = -i k (u^{n+1})^ / (n+1) where u is the inverse transform of state.
  void nonlinear(std::span<const Complex> state, std::span<Complex> out);

  /// Physical samples of the state.
  void to_physical(std::span<const Complex> state, std::span<double> out) const;
  void to_spectrum(std::span<const double> values, std::span<Complex> out) const;

  /// Invariants of the field represented by state; also returns the grid
  /// argmax of u through argmax when non-null.
  Invariants invariants(std::span<const Complex> state, int* argmax = nullptr);

 private:
  Grid grid_;
  ModelParams params_;
  bool dealias_;
  RealTransform fft_;
  std::vector<Complex> linear_;
  std::vector<Complex> ik_;
  std::vector<double> nl_factor_;  // -k/(n+1) per mode; F = i * factor * (u^{n+1})^
  std::vector<double> u_;
  std::vector<double> w_;
  std::vector<Complex> work_;
};

}  // namespace gkdv
