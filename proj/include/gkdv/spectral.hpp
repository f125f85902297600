#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

namespace gkdv {

using Complex = std::complex<double>;

/// Periodic Fourier collocation grid on x in D*[-pi, pi).
///
/// Nodes are x_j = -D*pi + j*(2*D*pi/N). Wavenumbers follow FFT ordering:
/// j/D for j < N/2 and (j - N)/D for j >= N/2, so the Nyquist mode carries
/// the physical value -N/(2D).
class Grid {
 public:
  Grid(int modes, double half_width);

  int size() const { return modes_; }
  /// Number of non-redundant coefficients of a real field (N/2 + 1).
  int spectrum_size() const { return modes_ / 2 + 1; }
  double half_width() const { return half_width_; }
  double spacing() const;
  double length() const;

  double node(int j) const;
  const std::vector<double>& nodes() const { return nodes_; }

  double wavenumber(int j) const;
  std::vector<double> wavenumbers() const;
  /// Physical wavenumbers j/D for j = 0..N/2 (the half spectrum of a real field).
  std::vector<double> half_wavenumbers() const;

  /// Node index closest to x after folding x into the periodic domain.
  int nearest_node(double x) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.modes_ == b.modes_ && a.half_width_ == b.half_width_;
  }

 private:
  int modes_;
  double half_width_;
  std::vector<double> nodes_;
};

/// Throws std::invalid_argument for odd N, N < 4 or D <= 0.
Grid make_grid(int modes, double half_width);

/// Real samples on a grid. Coefficients are computed on demand.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field(Grid g, std::vector<double> v);
  explicit Field(Grid g);

  template <class F>
  static Field sample(const Grid& g, F&& f) {
    std::vector<double> v(g.size());
    for (int j = 0; j < g.size(); ++j) v[j] = f(g.node(j));
    return Field(g, std::move(v));
  }

  int size() const { return grid.size(); }
  /// All N coefficients in FFT ordering, forward transform unnormalized.
  std::vector<Complex> coefficients() const;
  double max_abs() const;
};

/// r2c / c2r transform pair of fixed length. Forward is unnormalized, inverse
/// divides by N. Holds private scratch buffers, so one instance must not be
/// shared between threads; separate instances are independent.
/// Plans use FFTW_ESTIMATE unless a wisdom file is configured, either here or
/// through the GKDV_FFTW_WISDOM environment variable. With a wisdom file, plans
/// are measured once, stored, and reused by later runs; results are then
/// reproducible for runs sharing that file. An empty path restores ESTIMATE.
void set_fft_wisdom_file(const std::string& path);

class RealTransform {
 public:
  explicit RealTransform(int n);
  ~RealTransform();
  RealTransform(const RealTransform&) = delete;
  RealTransform& operator=(const RealTransform&) = delete;
  RealTransform(RealTransform&& other) noexcept;
  RealTransform& operator=(RealTransform&& other) noexcept;

  int size() const { return n_; }
  void forward(std::span<const double> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  // In-place access for hot loops: execute_* run the plans on the internal
  // buffers, unnormalized. The inverse overwrites the spectrum buffer.
  double* real_buffer() const { return real_; }
  Complex* spectrum_buffer() const { return reinterpret_cast<Complex*>(spec_); }
  void execute_forward() const { fftw_execute(forward_plan_); }
  void execute_inverse() const { fftw_execute(inverse_plan_); }

 private:
  void release();

  int n_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_plan_ = nullptr;
  fftw_plan inverse_plan_ = nullptr;
};

/// Multipliers (i k)^m on the half spectrum. Odd orders zero the Nyquist mode.
std::vector<Complex> derivative_symbol(const Grid& g, int order);

/// Periodic trapezoid rule: spacing * sum(values).
double integrate(const Grid& g, std::span<const double> values);

/// Coefficients c_k of a real field evaluated pointwise at x from its half
/// spectrum (unnormalized), i.e. the trigonometric interpolant.
double evaluate_at(const Grid& g, std::span<const Complex> half_spectrum, double x);

Field spectral_derivative(const Field& f, int order);

struct Extremum {
  double x = 0;
  double value = 0;
};

/// Local extremum of the trigonometric interpolant by Newton's method on
/// u' = 0, started at x_start (normally the grid argmax). Falls back to
/// x_start when the iteration leaves the neighbouring cells.
Extremum refine_extremum(const Grid& g, std::span<const Complex> half_spectrum, double x_start);

/// Max |c_k| over the top 10% of |k|, normalized by max_k |c_k|; 0 for a zero
/// field. Used as the resolution indicator.
double tail_magnitude(const Field& f);
double tail_magnitude(const Grid& g, std::span<const Complex> half_spectrum);

/// Not-a-knot cubic spline through the samples of a periodic field. Query
/// points are folded into the periodic domain first.
class PeriodicSpline {
 public:
  /// wrap_node appends the periodic image of node 0 at x = D*pi so points in
  /// the last cell (x_{N-1}, D*pi) can be interpolated.
  PeriodicSpline(const Field& f, bool wrap_node);

  double operator()(double x) const;
  bool covers(double folded_x) const;

 private:
  double x0_;
  double h_;
  double period_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

/// Cubic-spline interpolation of f onto the nodes of target; target nodes
/// outside the source domain use the periodic extension of f.
Field resample(const Field& f, const Grid& target);

/// Zero the upper third of the half spectrum (2/3 rule).
void dealias(std::span<Complex> half_spectrum);

}  // namespace gkdv
