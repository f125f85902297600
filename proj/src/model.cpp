#include "gkdv/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gkdv/warnings.hpp"

namespace gkdv {

namespace {

constexpr double kEnergyZeroThreshold = 1e-10;

// sech(y) without overflow for large |y|
double sech(double y) {
  const double e = std::exp(-std::abs(y));
  return 2.0 * e / (1.0 + e * e);
}

double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

void ModelParams::validate() const {
  if (n < 1) throw std::invalid_argument("model: n must be a positive integer");
  if (!(eps > 0) || !std::isfinite(eps)) throw std::invalid_argument("model: eps must be positive");
}

double soliton_profile(double c, double z, const ModelParams& p) {
  const double amp = (p.n + 1.0) * (p.n + 2.0) * c / 2.0;
  const double s = sech(std::sqrt(c) * p.n * z / (2.0 * p.eps));
  return std::pow(amp * s * s, 1.0 / p.n);
}

Field soliton(double c, double x0, const ModelParams& p, const Grid& g) {
  p.validate();
  if (!(c > 0)) throw std::invalid_argument("soliton: speed c must be positive");
  Field f = Field::sample(g, [&](double x) { return soliton_profile(c, x - x0, p); });
  const double peak = soliton_profile(c, 0.0, p);
  const double edge = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
  if (edge > 1e-12 * peak) {
    std::ostringstream os;
    os << "soliton boundary value " << edge << " exceeds 1e-12 of the peak " << peak
       << "; enlarge the domain (D = " << g.half_width() << ")";
    warn(os.str());
  }
  return f;
}

Invariants invariants(const Field& f, const ModelParams& p) {
  p.validate();
  GkdvOperator op(f.grid, p);
  std::vector<Complex> c(f.grid.spectrum_size());
  op.to_spectrum(f.values, c);
  return op.invariants(c);
}

double delta_indicator(double energy_now, double energy_initial) {
  if (std::abs(energy_initial) > kEnergyZeroThreshold) {
    return std::abs(energy_now / energy_initial - 1.0);
  }
  return std::abs(energy_now - energy_initial);
}

double hopf_critical_time(double beta, const ModelParams& p) {
  p.validate();
  if (!(beta > 0)) throw std::invalid_argument("hopf_critical_time: beta must be positive");
  const double n = p.n;
  return std::pow(1.0 + 2.0 * n, n + 0.5) / (std::pow(2.0 * n, n + 1.0) * std::pow(beta, n));
}

RhsSplit rhs_split(const Field& f, const ModelParams& p) {
  p.validate();
  GkdvOperator op(f.grid, p);
  const int n = f.grid.size();
  std::vector<Complex> state(f.grid.spectrum_size()), nl(f.grid.spectrum_size());
  op.to_spectrum(f.values, state);
  op.nonlinear(state, nl);
  RhsSplit out{std::vector<Complex>(n), std::vector<Complex>(n)};
  const auto lin = op.linear_symbol();
  for (int j = 0; j <= n / 2; ++j) {
    out.linear[j] = lin[j];
    out.nonlinear[j] = nl[j];
  }
  for (int j = n / 2 + 1; j < n; ++j) {
    out.linear[j] = std::conj(lin[n - j]);
    out.nonlinear[j] = std::conj(nl[n - j]);
  }
  return out;
}

GkdvOperator::GkdvOperator(const Grid& g, const ModelParams& p, bool dealias)
    : grid_(g),
      params_(p),
      dealias_(dealias),
      fft_(g.size()),
      ik_(derivative_symbol(g, 1)),
      u_(g.size()),
      w_(g.size()),
      work_(g.spectrum_size()) {
  params_.validate();
  nl_factor_.resize(ik_.size());
  for (std::size_t j = 0; j < ik_.size(); ++j) nl_factor_[j] = -ik_[j].imag() / (params_.n + 1.0);
  linear_ = derivative_symbol(g, 3);
  // L = i eps^2 k^3 = -eps^2 (ik)^3
  for (auto& l : linear_) l *= -params_.eps * params_.eps;
}

void GkdvOperator::to_physical(std::span<const Complex> state, std::span<double> out) const {
  fft_.inverse(state, out);
}

void GkdvOperator::to_spectrum(std::span<const double> values, std::span<Complex> out) const {
  fft_.forward(values, out);
}

void GkdvOperator::nonlinear(std::span<const Complex> state, std::span<Complex> out) {
  const int m = grid_.spectrum_size();
  const int size = grid_.size();
  Complex* spec = fft_.spectrum_buffer();
  double* u = fft_.real_buffer();
  std::copy(state.begin(), state.begin() + m, spec);
  spec[0].imag(0.0);
  spec[m - 1].imag(0.0);
  fft_.execute_inverse();
  const double scale = 1.0 / size;
  switch (params_.n) {
    case 4:
      for (int j = 0; j < size; ++j) {
        const double v = u[j] * scale;
        const double v2 = v * v;
        u[j] = v2 * v2 * v;
      }
      break;
    case 5:
      for (int j = 0; j < size; ++j) {
        const double v = u[j] * scale;
        const double v3 = v * v * v;
        u[j] = v3 * v3;
      }
      break;
    default:
      for (int j = 0; j < size; ++j) u[j] = int_pow(u[j] * scale, params_.n + 1);
  }
  fft_.execute_forward();
  for (int j = 0; j < m; ++j) {
    const double f = nl_factor_[j];
    out[j] = Complex(-spec[j].imag() * f, spec[j].real() * f);
  }
  if (dealias_) dealias(out);
}

Invariants GkdvOperator::invariants(std::span<const Complex> state, int* argmax) {
  fft_.inverse(state, u_);
  for (std::size_t j = 0; j < work_.size(); ++j) work_[j] = state[j] * ik_[j];
  fft_.inverse(work_, w_);
  const int n = params_.n;
  const double e2 = params_.eps * params_.eps;
  const double cpot = 1.0 / ((n + 1.0) * (n + 2.0));
  double mass = 0, kin = 0, pot = 0, linf = 0;
  int imax = 0;
  for (std::size_t j = 0; j < u_.size(); ++j) {
    const double u = u_[j];
    mass += u * u;
    kin += w_[j] * w_[j];
    pot += int_pow(u, n + 2);
    linf = std::max(linf, std::abs(u));
    if (u > u_[imax]) imax = static_cast<int>(j);
  }
  const double dx = grid_.spacing();
  if (argmax) *argmax = imax;
  return {mass * dx, (0.5 * e2 * kin - cpot * pot) * dx, linf, std::sqrt(kin * dx)};
}

}  // namespace gkdv
