#include "gkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace gkdv {

namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct WisdomState {
  bool initialized = false;
  std::string path;
};

// guarded by planner_mutex
WisdomState& wisdom_state() {
  static WisdomState w;
  if (!w.initialized) {
    w.initialized = true;
    if (const char* env = std::getenv("GKDV_FFTW_WISDOM")) w.path = env;
  }
  return w;
}

double fold(double x, double x0, double period) {
  double r = std::fmod(x - x0, period);
  if (r < 0) r += period;
  return x0 + r;
}

}  // namespace

Grid::Grid(int modes, double half_width) : modes_(modes), half_width_(half_width) {
  if (modes < 4 || modes % 2 != 0) {
    throw std::invalid_argument("invalid-N: mode count must be even and >= 4, got " +
                                std::to_string(modes));
  }
  if (!(half_width > 0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("invalid-D: half-width factor must be positive");
  }
  nodes_.resize(modes_);
  for (int j = 0; j < modes_; ++j) nodes_[j] = node(j);
}

double Grid::spacing() const { return 2.0 * half_width_ * std::numbers::pi / modes_; }

double Grid::length() const { return 2.0 * half_width_ * std::numbers::pi; }

double Grid::node(int j) const { return -half_width_ * std::numbers::pi + j * spacing(); }

double Grid::wavenumber(int j) const {
  return (j < modes_ / 2 ? j : j - modes_) / half_width_;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(modes_);
  for (int j = 0; j < modes_; ++j) k[j] = wavenumber(j);
  return k;
}

std::vector<double> Grid::half_wavenumbers() const {
  std::vector<double> k(spectrum_size());
  for (int j = 0; j < spectrum_size(); ++j) k[j] = j / half_width_;
  return k;
}

int Grid::nearest_node(double x) const {
  const double folded = fold(x, nodes_.front(), length());
  long j = std::lround((folded - nodes_.front()) / spacing());
  return static_cast<int>(((j % modes_) + modes_) % modes_);
}

Grid make_grid(int modes, double half_width) { return Grid(modes, half_width); }

Field::Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.size()) {
    throw std::invalid_argument("field size does not match grid");
  }
}

Field::Field(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

std::vector<Complex> Field::coefficients() const {
  const int n = grid.size();
  RealTransform fft(n);
  std::vector<Complex> half(grid.spectrum_size());
  fft.forward(values, half);
  std::vector<Complex> full(n);
  for (int j = 0; j <= n / 2; ++j) full[j] = half[j];
  for (int j = n / 2 + 1; j < n; ++j) full[j] = std::conj(half[n - j]);
  return full;
}

double Field::max_abs() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

RealTransform::RealTransform(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("transform length must be >= 2");
  real_ = fftw_alloc_real(n);
  spec_ = fftw_alloc_complex(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  const auto& wisdom = wisdom_state();
  if (wisdom.path.empty()) {
    // FFTW_ESTIMATE keeps plan selection deterministic, so reruns are bit-identical.
    forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
  } else {
    fftw_import_wisdom_from_filename(wisdom.path.c_str());
    forward_plan_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_MEASURE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_MEASURE);
    fftw_export_wisdom_to_filename(wisdom.path.c_str());
  }
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW planning failed");
}

void set_fft_wisdom_file(const std::string& path) {
  std::lock_guard lock(planner_mutex());
  wisdom_state().path = path;
}

RealTransform::~RealTransform() { release(); }

RealTransform::RealTransform(RealTransform&& other) noexcept
    : n_(other.n_),
      real_(other.real_),
      spec_(other.spec_),
      forward_plan_(other.forward_plan_),
      inverse_plan_(other.inverse_plan_) {
  other.real_ = nullptr;
  other.spec_ = nullptr;
  other.forward_plan_ = nullptr;
  other.inverse_plan_ = nullptr;
}

RealTransform& RealTransform::operator=(RealTransform&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    real_ = std::exchange(other.real_, nullptr);
    spec_ = std::exchange(other.spec_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
  }
  return *this;
}

void RealTransform::release() {
  if (forward_plan_ || inverse_plan_) {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(forward_plan_);
    if (inverse_plan_) fftw_destroy_plan(inverse_plan_);
  }
  if (real_) fftw_free(real_);
  if (spec_) fftw_free(spec_);
  forward_plan_ = inverse_plan_ = nullptr;
  real_ = nullptr;
  spec_ = nullptr;
}

void RealTransform::forward(std::span<const double> in, std::span<Complex> out) const {
  std::copy(in.begin(), in.begin() + n_, real_);
  fftw_execute(forward_plan_);
  const auto* s = reinterpret_cast<const Complex*>(spec_);
  std::copy(s, s + n_ / 2 + 1, out.begin());
}

void RealTransform::inverse(std::span<const Complex> in, std::span<double> out) const {
  std::copy(in.begin(), in.begin() + n_ / 2 + 1, reinterpret_cast<Complex*>(spec_));
  // c2r assumes a real Nyquist and DC coefficient
  spec_[0][1] = 0.0;
  spec_[n_ / 2][1] = 0.0;
  fftw_execute(inverse_plan_);
  const double scale = 1.0 / n_;
  for (int j = 0; j < n_; ++j) out[j] = real_[j] * scale;
}

std::vector<Complex> derivative_symbol(const Grid& g, int order) {
  const auto k = g.half_wavenumbers();
  std::vector<Complex> sym(k.size());
  // exact powers of i avoid rounding in the real/imaginary split
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double kp = std::pow(k[j], order);
    switch (order % 4) {
      case 0: sym[j] = {kp, 0.0}; break;
      case 1: sym[j] = {0.0, kp}; break;
      case 2: sym[j] = {-kp, 0.0}; break;
      default: sym[j] = {0.0, -kp}; break;
    }
  }
  if (order % 2 == 1) sym.back() = 0.0;
  return sym;
}

double integrate(const Grid& g, std::span<const double> values) {
  double s = 0;
  for (double v : values) s += v;
  return s * g.spacing();
}

double evaluate_at(const Grid& g, std::span<const Complex> half_spectrum, double x) {
  const int n = g.size();
  const double shift = x - g.node(0);
  const double dk = 1.0 / g.half_width();
  double s = half_spectrum[0].real();
  for (int j = 1; j < n / 2; ++j) {
    const double phase = j * dk * shift;
    s += 2.0 * (half_spectrum[j].real() * std::cos(phase) -
                half_spectrum[j].imag() * std::sin(phase));
  }
  s += half_spectrum[n / 2].real() * std::cos((n / 2) * dk * shift);
  return s / n;
}

Extremum refine_extremum(const Grid& g, std::span<const Complex> half_spectrum, double x_start) {
  const int n = g.size();
  const double dk = 1.0 / g.half_width();
  // u, u', u'' at x; phases by recurrence, reset every 64 modes
  auto eval = [&](double x, double& d1, double& d2) {
    const double shift = x - g.node(0);
    double u = half_spectrum[0].real();
    d1 = d2 = 0;
    Complex e(1, 0), step(std::cos(dk * shift), std::sin(dk * shift));
    for (int j = 1; j <= n / 2; ++j) {
      if (j % 64 == 0) {
        e = Complex(std::cos(j * dk * shift), std::sin(j * dk * shift));
      } else {
        e *= step;
      }
      const double f = j == n / 2 ? 1.0 : 2.0;
      const Complex z = half_spectrum[j] * e;
      const double k = j * dk;
      u += f * z.real();
      if (j < n / 2) {
        d1 -= f * k * z.imag();
        d2 -= f * k * k * z.real();
      }
    }
    d1 /= n;
    d2 /= n;
    return u / n;
  };
  const double h = g.spacing();
  double x = x_start, d1 = 0, d2 = 0;
  double u = eval(x, d1, d2);
  const Extremum fallback{x_start, u};
  for (int it = 0; it < 20; ++it) {
    if (d2 == 0) return fallback;
    const double dx = -d1 / d2;
    x += dx;
    if (std::abs(x - x_start) > h) return fallback;
    u = eval(x, d1, d2);
    if (std::abs(dx) < 1e-13 * h) break;
  }
  return {x, u};
}

Field spectral_derivative(const Field& f, int order) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("unsupported derivative order " + std::to_string(order));
  }
  const Grid& g = f.grid;
  RealTransform fft(g.size());
  std::vector<Complex> c(g.spectrum_size());
  fft.forward(f.values, c);
  const auto sym = derivative_symbol(g, order);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= sym[j];
  Field out(g);
  fft.inverse(c, out.values);
  return out;
}

double tail_magnitude(const Grid& g, std::span<const Complex> half_spectrum) {
  double peak = 0;
  for (const auto& c : half_spectrum) peak = std::max(peak, std::abs(c));
  if (peak == 0) return 0;
  const int kmax = g.size() / 2;
  const int start = static_cast<int>(std::ceil(0.9 * kmax));
  double tail = 0;
  for (int j = start; j <= kmax; ++j) tail = std::max(tail, std::abs(half_spectrum[j]));
  return tail / peak;
}

double tail_magnitude(const Field& f) {
  RealTransform fft(f.size());
  std::vector<Complex> c(f.grid.spectrum_size());
  fft.forward(f.values, c);
  return tail_magnitude(f.grid, c);
}

PeriodicSpline::PeriodicSpline(const Field& f, bool wrap_node)
    : x0_(f.grid.node(0)), h_(f.grid.spacing()), period_(f.grid.length()), y_(f.values) {
  if (wrap_node) y_.push_back(f.values.front());
  const int last = static_cast<int>(y_.size()) - 1;  // knots 0..last
  if (last < 3) throw std::invalid_argument("spline needs at least 4 knots");
  m_.assign(y_.size(), 0.0);
  std::vector<double> rhs(y_.size(), 0.0);
  const double s = 6.0 / (h_ * h_);
  for (int i = 1; i < last; ++i) rhs[i] = s * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]);

  // Not-a-knot: M0 = 2M1 - M2 and M_last = 2M_{last-1} - M_{last-2}. Substituted
  // into the first and last interior rows they decouple to 6*M = rhs.
  m_[1] = rhs[1] / 6.0;
  m_[last - 1] = rhs[last - 1] / 6.0;
  const int lo = 2;
  const int hi = last - 2;
  if (hi >= lo) {
    // tridiagonal rows i = lo..hi: M_{i-1} + 4 M_i + M_{i+1} = rhs_i
    const int cnt = hi - lo + 1;
    std::vector<double> c(cnt), d(cnt);
    for (int r = 0; r < cnt; ++r) {
      const int i = lo + r;
      double b = rhs[i];
      if (i == lo) b -= m_[lo - 1];
      if (i == hi) b -= m_[hi + 1];
      const double denom = r == 0 ? 4.0 : 4.0 - c[r - 1];
      c[r] = 1.0 / denom;
      d[r] = (r == 0 ? b : b - d[r - 1]) / denom;
    }
    m_[hi] = d[cnt - 1];
    for (int r = cnt - 2; r >= 0; --r) m_[lo + r] = d[r] - c[r] * m_[lo + r + 1];
  }
  m_[0] = 2.0 * m_[1] - m_[2];
  m_[last] = 2.0 * m_[last - 1] - m_[last - 2];
}

bool PeriodicSpline::covers(double folded_x) const {
  return folded_x <= x0_ + h_ * (static_cast<double>(y_.size()) - 1) + 1e-12 * h_;
}

double PeriodicSpline::operator()(double x) const {
  const double xf = fold(x, x0_, period_);
  const int last = static_cast<int>(y_.size()) - 1;
  int i = static_cast<int>(std::floor((xf - x0_) / h_));
  i = std::clamp(i, 0, last - 1);
  const double a = (x0_ + (i + 1) * h_ - xf) / h_;
  const double b = 1.0 - a;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h_ * h_) / 6.0;
}

Field resample(const Field& f, const Grid& target) {
  if (f.grid == target) return f;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("resample: non-finite source values");
  }
  const double last_node = f.grid.node(f.grid.size() - 1);
  bool needs_wrap = false;
  for (double x : target.nodes()) {
    if (fold(x, f.grid.node(0), f.grid.length()) > last_node) {
      needs_wrap = true;
      break;
    }
  }
  PeriodicSpline spline(f, needs_wrap);
  Field out(target);
  for (int j = 0; j < target.size(); ++j) out.values[j] = spline(target.node(j));
  return out;
}

void dealias(std::span<Complex> half_spectrum) {
  const std::size_t kmax = half_spectrum.size() - 1;
  const std::size_t cut = (2 * kmax) / 3;
  for (std::size_t j = cut + 1; j < half_spectrum.size(); ++j) half_spectrum[j] = 0.0;
}

}  // namespace gkdv
