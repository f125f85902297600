#include "gkdv/rescaled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gkdv {

namespace {

inline double int_pow(double x, int n) {
  switch (n) {
    case 4: { const double x2 = x * x; return x2 * x2; }
    case 5: { const double x2 = x * x; return x2 * x2 * x; }
    case 6: { const double x3 = x * x * x; return x3 * x3; }
    case 7: { const double x3 = x * x * x; return x3 * x3 * x; }
    default: {
      double r = 1.0;
      for (int i = 0; i < n; ++i) r *= x;
      return r;
    }
  }
}

bool finite(std::span<const Complex> v) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

// Coefficients divided by h, as functions of c = h L.
struct EtdCoefficients {
  Complex q, f1, f2, f3;
};

EtdCoefficients exact_coefficients(Complex c) {
  const Complex ec = std::exp(c);
  const Complex c3 = c * c * c;
  return {(std::exp(0.5 * c) - 1.0) / c, (-4.0 - c + ec * (4.0 - 3.0 * c + c * c)) / c3,
          (2.0 + c + ec * (c - 2.0)) / c3, (-4.0 - 3.0 * c - c * c + ec * (4.0 - c)) / c3};
}

EtdCoefficients taylor_coefficients(Complex c) {
  const Complex c2 = c * c;
  const Complex c3 = c2 * c;
  return {0.5 + c / 8.0 + c2 / 48.0 + c3 / 384.0,
          1.0 / 6.0 + c / 6.0 + 3.0 * c2 / 40.0 + c3 / 45.0,
          1.0 / 6.0 + c / 12.0 + c2 / 40.0 + c3 / 180.0,
          1.0 / 6.0 - c2 / 120.0 - c3 / 360.0};
}

}  // namespace

const char* to_string(Closure c) { return c == Closure::l2ux ? "l2ux" : "linf"; }

Closure closure_from_string(const std::string& s) {
  if (s == "l2ux") return Closure::l2ux;
  if (s == "linf") return Closure::linf;
  throw std::invalid_argument("unknown closure '" + s + "' (expected l2ux or linf)");
}

const char* to_string(RescaledStop r) {
  switch (r) {
    case RescaledStop::completed: return "completed";
    case RescaledStop::energy_drift: return "energy-drift";
    case RescaledStop::mass_drift: return "mass-drift";
    case RescaledStop::boundary: return "boundary";
    case RescaledStop::pin_lost: return "pin-lost";
    case RescaledStop::singular_curvature: return "singular-curvature";
    case RescaledStop::non_finite: return "non-finite";
  }
  return "unknown";
}

double compute_a(const Field& U, const ModelParams& p) {
  p.validate();
  const Field ux = spectral_derivative(U, 1);
  const Field uxxx = spectral_derivative(U, 3);
  double norm2 = 0, integral = 0;
  for (int j = 0; j < U.size(); ++j) {
    norm2 += ux.values[j] * ux.values[j];
    integral += int_pow(U.values[j], p.n + 1) * uxxx.values[j];
  }
  const double dx = U.grid.spacing();
  norm2 *= dx;
  integral *= dx;
  if (!(std::sqrt(norm2) > 1e-12)) throw DegenerateField("compute_a: ||U_xi||_2 vanishes");
  return 2.0 * p.n * integral / ((p.n + 1.0) * (p.n + 4.0) * norm2);
}

double compute_a_linf(const Field& U, const ModelParams& p, double xi0) {
  p.validate();
  const int pin = U.grid.nearest_node(xi0);
  const double u0 = U.values[pin];
  if (u0 == 0.0) throw DegenerateField("compute_a_linf: U(xi0) vanishes");
  const Field uxxx = spectral_derivative(U, 3);
  return 0.5 * p.n * p.eps * p.eps * uxxx.values[pin] / u0;
}

double compute_v(const Field& U, double a, double xi0, const ModelParams& p,
                 double curvature_floor) {
  p.validate();
  const int pin = U.grid.nearest_node(xi0);
  const Field uxx = spectral_derivative(U, 2);
  const Field uxxxx = spectral_derivative(U, 4);
  const double curv = uxx.values[pin];
  if (!(std::abs(curv) > curvature_floor * uxx.max_abs())) {
    throw SingularCurvature("compute_v: U_xixi(xi0) below the curvature floor");
  }
  const double xi = U.grid.node(pin);
  return -a * xi + int_pow(U.values[pin], p.n) + p.eps * p.eps * uxxxx.values[pin] / curv;
}

Field ode_residual(const Field& U, double a_inf, double v_inf, const ModelParams& p) {
  p.validate();
  const Field ux = spectral_derivative(U, 1);
  const Field uxxx = spectral_derivative(U, 3);
  Field r(U.grid);
  const double e2 = p.eps * p.eps;
  for (int j = 0; j < U.size(); ++j) {
    const double u = U.values[j];
    const double xi = U.grid.node(j);
    r.values[j] = -a_inf * (2.0 * u / p.n + xi * ux.values[j]) - v_inf * ux.values[j] +
                  int_pow(u, p.n) * ux.values[j] + e2 * uxxx.values[j];
  }
  return r;
}

double rescaled_energy(const Field& U, double L, const ModelParams& p) {
  if (!(L > 0)) throw std::invalid_argument("rescaled_energy: L must be positive");
  return std::pow(L, -(4.0 / p.n + 1.0)) * invariants(U, p).energy;
}

// ---------------------------------------------------------------------------

Etd4Stepper::Etd4Stepper(std::span<const Complex> linear, double h)
    : Etd4Stepper(linear, h, Options{}) {}

Etd4Stepper::Etd4Stepper(std::span<const Complex> linear, double h, const Options& opts) : h_(h) {
  if (!(h > 0)) throw std::invalid_argument("etd4: step must be positive");
  if (opts.contour_points < 4) throw std::invalid_argument("etd4: need at least 4 contour points");
  if (!(opts.contour_radius > 0)) throw std::invalid_argument("etd4: contour radius must be positive");
  const std::size_t m = linear.size();
  for (auto* v : {&e_, &e2_, &q_, &f1_, &f2_, &f3_, &na_, &nb_, &nc_, &nu_, &sa_, &sb_, &sc_}) {
    v->resize(m);
  }
  const int np = opts.contour_points;
  std::vector<Complex> roots(np);
  for (int k = 0; k < np; ++k) {
    const double theta = std::numbers::pi * (k + 0.5) * 2.0 / np;
    roots[k] = opts.contour_radius * Complex(std::cos(theta), std::sin(theta));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const Complex c = h * linear[j];
    e_[j] = std::exp(c);
    e2_[j] = std::exp(0.5 * c);
    EtdCoefficients co;
    if (std::abs(c) < opts.taylor_below) {
      co = taylor_coefficients(c);
    } else {
      co = {0.0, 0.0, 0.0, 0.0};
      for (const auto& r : roots) {
        const auto x = exact_coefficients(c + r);
        co.q += x.q;
        co.f1 += x.f1;
        co.f2 += x.f2;
        co.f3 += x.f3;
      }
      co.q /= double(np);
      co.f1 /= double(np);
      co.f2 /= double(np);
      co.f3 /= double(np);
    }
    q_[j] = h * co.q;
    f1_[j] = h * co.f1;
    f2_[j] = h * co.f2;
    f3_[j] = h * co.f3;
  }
}

void Etd4Stepper::step(std::vector<Complex>& u, const Nonlinear& nonlinear,
                       std::span<const Complex> n_start) {
  const std::size_t m = u.size();
  if (n_start.empty()) {
    nonlinear(u, nu_);
  } else {
    std::copy(n_start.begin(), n_start.end(), nu_.begin());
  }
  for (std::size_t j = 0; j < m; ++j) sa_[j] = e2_[j] * u[j] + q_[j] * nu_[j];
  nonlinear(sa_, na_);
  for (std::size_t j = 0; j < m; ++j) sb_[j] = e2_[j] * u[j] + q_[j] * na_[j];
  nonlinear(sb_, nb_);
  for (std::size_t j = 0; j < m; ++j) sc_[j] = e2_[j] * sa_[j] + q_[j] * (2.0 * nb_[j] - nu_[j]);
  nonlinear(sc_, nc_);
  for (std::size_t j = 0; j < m; ++j) {
    u[j] = e_[j] * u[j] + f1_[j] * nu_[j] + 2.0 * f2_[j] * (na_[j] + nb_[j]) + f3_[j] * nc_[j];
  }
}

void accumulate_scales(ScaleState& s, double a_new, double v_new, double h_tau) {
  const double l_prev = std::exp(s.ln_l);
  s.ln_l += 0.5 * h_tau * (s.a + a_new);
  const double l_new = std::exp(s.ln_l);
  s.t += 0.5 * h_tau * (l_prev * l_prev * l_prev + l_new * l_new * l_new);
  s.x_m += 0.5 * h_tau * (s.v * l_prev + v_new * l_new);
  s.a = a_new;
  s.v = v_new;
}

void RescaledConfig::validate() const {
  if (!(h > 0)) throw std::invalid_argument("rescaled: step h must be positive");
  if (!(curvature_floor >= 0)) throw std::invalid_argument("rescaled: curvature_floor must be >= 0");
  if (!(stop_energy_drift > 0) || !(stop_mass_drift > 0) || !(stop_boundary > 0) ||
      !(stop_pin > 0)) {
    throw std::invalid_argument("rescaled: stop thresholds must be positive");
  }
  if (etd.contour_points < 4) throw std::invalid_argument("rescaled: contour_points must be >= 4");
  if (!(etd.contour_radius > 0)) throw std::invalid_argument("rescaled: contour_radius must be positive");
}

// ---------------------------------------------------------------------------

RescaledOperator::RescaledOperator(const Grid& g, const ModelParams& p, const RescaledConfig& cfg)
    : grid_(g),
      params_(p),
      closure_(cfg.closure),
      curvature_floor_(cfg.curvature_floor),
      dealias_(cfg.dealias),
      pin_(g.nearest_node(cfg.xi0)),
      xi0_(g.node(pin_)),
      fft_(g.size()),
      ik_(derivative_symbol(g, 1)),
      ik3_(derivative_symbol(g, 3)),
      xi_(g.nodes()),
      u_(g.size()),
      ux_(g.size()),
      uxxx_(g.size()),
      w_(g.size()),
      work_(g.spectrum_size()) {
  params_.validate();
  linear_ = ik3_;
  for (auto& l : linear_) l *= -params_.eps * params_.eps;
  // Re(sum_j f_j (i k_j)^m c_j e^{i k_j (xi0 - xi_first)}) / N with f = 2, 1 at DC
  // and Nyquist; odd orders drop the Nyquist mode
  const int n = g.size();
  const int m = g.spectrum_size();
  const double dk = 1.0 / g.half_width();
  curv_weights_.resize(m);
  for (int order = 1; order <= 4; ++order) {
    auto& w = point_weights_[order - 1];
    w.resize(m);
    const auto sym = derivative_symbol(g, order);
    for (int j = 0; j < m; ++j) {
      const long r = (static_cast<long>(j) * pin_) % n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / n;
      const double f = (j == 0 || j == m - 1) ? 1.0 : 2.0;
      w[j] = f * sym[j] * Complex(std::cos(angle), std::sin(angle)) / double(n);
    }
  }
  for (int j = 0; j < m; ++j) {
    const double f = (j == 0 || j == m - 1) ? 1.0 : 2.0;
    curv_weights_[j] = f * (j * dk) * (j * dk) / n;
  }
}

void RescaledOperator::to_physical(std::span<const Complex> state, std::span<double> out) const {
  fft_.inverse(state, out);
}

void RescaledOperator::to_spectrum(std::span<const double> values, std::span<Complex> out) const {
  fft_.forward(values, out);
}

double RescaledOperator::point_derivative(std::span<const Complex> state, int order) const {
  const auto& w = point_weights_[order - 1];
  double s = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    s += state[j].real() * w[j].real() - state[j].imag() * w[j].imag();
  }
  return s;
}

RescaledOperator::Eval RescaledOperator::evaluate(std::span<const Complex> state,
                                                  std::span<Complex> out) {
  const int n = params_.n;
  const int size = grid_.size();
  const int m = grid_.spectrum_size();
  const double dx = grid_.spacing();
  const double e2 = params_.eps * params_.eps;

  fft_.inverse(state, u_);
  for (int j = 0; j < m; ++j) work_[j] = state[j] * ik_[j];
  fft_.inverse(work_, ux_);

  Eval ev;
  double norm2 = 0, uxmax = 0;
  for (int j = 0; j < size; ++j) {
    norm2 += ux_[j] * ux_[j];
    uxmax = std::max(uxmax, std::abs(ux_[j]));
  }
  norm2 *= dx;
  ev.l2_uxi = std::sqrt(norm2);
  ev.pin = uxmax > 0 ? std::abs(ux_[pin_]) / uxmax : 0.0;

  const double u0 = u_[pin_];
  if (closure_ == Closure::l2ux) {
    for (int j = 0; j < m; ++j) work_[j] = state[j] * ik3_[j];
    fft_.inverse(work_, uxxx_);
    if (!(ev.l2_uxi > 1e-12)) throw DegenerateField("rescaled: ||U_xi||_2 vanishes");
    double integral = 0;
    for (int j = 0; j < size; ++j) integral += int_pow(u_[j], n + 1) * uxxx_[j];
    integral *= dx;
    ev.a = 2.0 * n * integral / ((n + 1.0) * (n + 4.0) * norm2);
  } else {
    if (u0 == 0.0) throw DegenerateField("rescaled: U(xi0) vanishes");
    ev.a = 0.5 * n * e2 * point_derivative(state, 3) / u0;
  }

  const double curv = point_derivative(state, 2);
  // max|U_xixi| bounded through the spectrum avoids another transform
  double curv_scale = 0;
  for (int j = 1; j < m; ++j) curv_scale += curv_weights_[j] * std::abs(state[j]);
  if (!(std::abs(curv) > curvature_floor_ * curv_scale)) {
    throw SingularCurvature("rescaled: U_xixi(xi0) below the curvature floor");
  }
  // (a xi - U^n) U_xi; the frame term v U_xi is added once v is known
  double* w = fft_.real_buffer();
  for (int j = 0; j < size; ++j) w[j] = (ev.a * xi_[j] - int_pow(u_[j], n)) * ux_[j];
  fft_.execute_forward();
  const Complex* spec = fft_.spectrum_buffer();
  const double lin = 2.0 * ev.a / n;

  // v from d/dtau U_xi(xi0) = 0 applied to the discrete right-hand side. At a
  // flat maximum this is -a xi0 + U^n + eps^2 U''''/U'' in the continuum, but
  // the discrete form carries the aliasing of the evolution itself, so the
  // pinned maximum does not creep away from xi0 on a finite grid.
  const int cut = dealias_ ? 2 * (m - 1) / 3 + 1 : m;
  const auto& w1 = point_weights_[0];
  double rest = 0, slope = 0;
  for (int j = 0; j < cut; ++j) {
    rest += (w1[j] * (spec[j] + (lin + linear_[j]) * state[j])).real();
    slope += (w1[j] * ik_[j] * state[j]).real();
  }
  ev.v = -rest / slope;

  if (!out.empty()) {
    for (int j = 0; j < m; ++j) out[j] = spec[j] + (lin + ev.v * ik_[j]) * state[j];
    if (dealias_) dealias(out);
  }
  return ev;
}

// ---------------------------------------------------------------------------

double RescaleState::L() const { return std::exp(scales.ln_l); }

RescaleState prepare_rescaled(const Field& u0, double xi0) {
  const Grid& g = u0.grid;
  for (double v : u0.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("prepare_rescaled: non-finite initial data");
  }
  const int pin = g.nearest_node(xi0);
  const double xi_pin = g.node(pin);
  const auto it = std::max_element(u0.values.begin(), u0.values.end());
  if (*it <= 0) throw DegenerateField("prepare_rescaled: initial data has no positive maximum");
  const int imax = static_cast<int>(it - u0.values.begin());

  RealTransform fft(g.size());
  std::vector<Complex> c(g.spectrum_size());
  fft.forward(u0.values, c);
  const auto s1 = derivative_symbol(g, 1);
  const auto s2 = derivative_symbol(g, 2);
  std::vector<Complex> d1(c.size()), d2(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    d1[j] = c[j] * s1[j];
    d2[j] = c[j] * s2[j];
  }
  // Newton on u' = 0 started from the grid argmax
  double x = g.node(imax);
  for (int iter = 0; iter < 30; ++iter) {
    const double f1 = evaluate_at(g, d1, x);
    const double f2 = evaluate_at(g, d2, x);
    if (!(f2 < 0)) break;
    const double dx = std::clamp(-f1 / f2, -g.spacing(), g.spacing());
    x += dx;
    if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }

  RescaleState s;
  s.xi0 = xi_pin;
  s.U = u0;
  const double shift = xi_pin - x;
  s.scales.x_m = -shift;
  if (std::abs(shift) > 1e-14 * g.spacing()) {
    const auto k = g.half_wavenumbers();
    for (std::size_t j = 0; j < c.size(); ++j) {
      c[j] *= std::exp(Complex(0.0, -k[j] * shift));
    }
    c.back() = 0.0;  // a shifted Nyquist mode is no longer real
    fft.inverse(c, s.U.values);
  }
  return s;
}

RescaledTrajectory run_rescaled(const Field& u0, const RescaledConfig& cfg, const ModelParams& p,
                                double tau_end, const RescaledOptions& opts) {
  return run_rescaled(prepare_rescaled(u0, cfg.xi0), cfg, p, tau_end, opts);
}

RescaledTrajectory run_rescaled(const RescaleState& start, const RescaledConfig& cfg_in,
                                const ModelParams& p, double tau_end,
                                const RescaledOptions& opts) {
  cfg_in.validate();
  p.validate();
  if (!(tau_end > 0)) throw std::invalid_argument("run_rescaled: tau_end must be positive");
  RescaledConfig cfg = cfg_in;
  cfg.xi0 = start.xi0;
  const Grid& g = start.U.grid;
  const int n = p.n;
  const double dx = g.spacing();
  const double e2 = p.eps * p.eps;
  const double cpot = 1.0 / ((n + 1.0) * (n + 2.0));
  const int edge = std::max(1, g.size() / 100);

  RescaledOperator op(g, p, cfg);
  std::vector<Complex> state(g.spectrum_size()), nbuf(g.spectrum_size());
  op.to_spectrum(start.U.values, state);
  std::vector<double> u(g.size());

  RescaledTrajectory traj;
  traj.final_state = start;

  ScaleState scales = start.scales;
  RescaledOperator::Eval ev = op.evaluate(state, nbuf);
  scales.a = ev.a;
  scales.v = ev.v;

  // energy, mass and boundary values from the physical samples
  auto diagnose = [&](double tau, const ScaleState& sc, const RescaledOperator::Eval& e) {
    op.to_physical(state, u);
    double mass = 0, kin = e.l2_uxi * e.l2_uxi, pot = 0, umax = 0, bnd = 0;
    for (int j = 0; j < g.size(); ++j) {
      mass += u[j] * u[j];
      pot += int_pow(u[j], n + 2);
      umax = std::max(umax, std::abs(u[j]));
    }
    for (int j = 0; j < edge; ++j) {
      bnd = std::max({bnd, std::abs(u[j]), std::abs(u[g.size() - 1 - j])});
    }
    mass *= dx;
    pot *= dx;
    const double L = std::exp(sc.ln_l);
    RescaledRecord r;
    r.tau = tau;
    r.t = sc.t;
    r.L = L;
    r.a = sc.a;
    r.v = sc.v;
    r.x_m = sc.x_m;
    r.x_max = sc.x_m + L * start.xi0;
    r.l2_uxi = e.l2_uxi;
    r.energy = std::pow(L, -(4.0 / n + 1.0)) * (0.5 * e2 * kin - cpot * pot);
    r.mass = std::pow(L, 1.0 - 4.0 / n) * mass;
    r.linf = std::pow(L, -2.0 / n) * umax;
    r.l2ux = std::pow(L, -2.0 / n - 0.5) * e.l2_uxi;
    r.tail = tail_magnitude(g, state);
    r.pin = e.pin;
    r.boundary = bnd;
    return r;
  };

  std::vector<double> snaps = opts.snapshot_taus;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&](double tau, const ScaleState& sc) {
    while (next_snap < snaps.size() && snaps[next_snap] <= tau + 0.5 * cfg.h) {
      op.to_physical(state, u);
      traj.snapshots.push_back({sc.t, tau, Field(g, u), std::exp(sc.ln_l), sc.x_m});
      ++next_snap;
    }
  };

  RescaledRecord first = diagnose(start.tau, scales, ev);
  const double e0 = first.energy;
  const double m0 = first.mass;
  traj.records.push_back(first);
  take_snapshots(start.tau, scales);

  Etd4Stepper etd(op.linear_symbol(), cfg.h, cfg.etd);
  const Etd4Stepper::Nonlinear nonlinear = [&](std::span<const Complex> in,
                                              std::span<Complex> out) { op.evaluate(in, out); };

  const long total = static_cast<long>(std::ceil((tau_end - start.tau) / cfg.h - 1e-9));
  const int stride = std::max(1, opts.record_stride);
  std::vector<Complex> previous;
  RescaledRecord last = first;
  double tau = start.tau;
  std::ostringstream msg;
  for (long k = 1; k <= total; ++k) {
    previous = state;
    const double tau_new = start.tau + k * cfg.h;
    ScaleState sc = scales;
    RescaledStop stop = RescaledStop::completed;
    RescaledRecord r;
    try {
      etd.step(state, nonlinear, nbuf);
      if (!finite(state)) {
        stop = RescaledStop::non_finite;
        msg << "non-finite state at tau = " << tau_new;
      } else {
        ev = op.evaluate(state, nbuf);
        accumulate_scales(sc, ev.a, ev.v, cfg.h);
        r = diagnose(tau_new, sc, ev);
        r.delta = delta_indicator(r.energy, e0);
        r.mass_drift = m0 != 0 ? std::abs(r.mass / m0 - 1.0) : std::abs(r.mass);
        if (!std::isfinite(r.energy) || !std::isfinite(sc.t) || !std::isfinite(r.a)) {
          stop = RescaledStop::non_finite;
          msg << "non-finite diagnostics at tau = " << tau_new;
        } else if (r.delta > cfg.stop_energy_drift) {
          stop = RescaledStop::energy_drift;
          msg << "energy drift " << r.delta << " exceeded " << cfg.stop_energy_drift
              << " at tau = " << tau_new;
        } else if (r.mass_drift > cfg.stop_mass_drift) {
          stop = RescaledStop::mass_drift;
          msg << "mass drift " << r.mass_drift << " exceeded " << cfg.stop_mass_drift
              << " at tau = " << tau_new;
        } else if (r.boundary > cfg.stop_boundary) {
          stop = RescaledStop::boundary;
          msg << "boundary amplitude " << r.boundary << " exceeded " << cfg.stop_boundary
              << " at tau = " << tau_new;
        } else if (r.pin > cfg.stop_pin) {
          stop = RescaledStop::pin_lost;
          msg << "pinning residual " << r.pin << " exceeded " << cfg.stop_pin
              << " at tau = " << tau_new;
        }
      }
    } catch (const SingularCurvature& e) {
      stop = RescaledStop::singular_curvature;
      msg << e.what() << " at tau = " << tau_new;
    } catch (const DegenerateField& e) {
      stop = RescaledStop::singular_curvature;
      msg << e.what() << " at tau = " << tau_new;
    }
    if (stop != RescaledStop::completed) {
      state = previous;
      traj.stop = stop;
      traj.message = msg.str();
      break;
    }
    scales = sc;
    tau = tau_new;
    traj.steps = k;
    last = r;
    if (k % stride == 0) traj.records.push_back(r);
    take_snapshots(tau, scales);
  }
  if (traj.records.back().tau != last.tau) traj.records.push_back(last);

  op.to_physical(state, u);
  traj.final_state.U = Field(g, u);
  traj.final_state.tau = tau;
  traj.final_state.scales = scales;
  traj.final_state.xi0 = start.xi0;
  return traj;
}

PhysicalFrame to_physical_frame(const RescaleState& s, const ModelParams& p, const Grid& target) {
  p.validate();
  const Grid& g = s.U.grid;
  const double L = s.L();
  const double amp = std::pow(L, -2.0 / p.n);
  const double lo = g.node(0);
  const double hi = lo + g.length();
  PeriodicSpline spline(s.U, true);
  PhysicalFrame out{Field(target), std::vector<char>(target.size(), 0)};
  for (int j = 0; j < target.size(); ++j) {
    const double xi = (target.node(j) - s.scales.x_m) / L;
    if (xi >= lo && xi < hi) {
      out.inside[j] = 1;
      out.field.values[j] = amp * spline(xi);
    }
  }
  return out;
}

}  // namespace gkdv
