#include "gkdv/direct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gkdv {

namespace {

const double kSqrt3 = std::sqrt(3.0);
// Gauss-Legendre, two stages
const double kA11 = 0.25;
const double kA12 = 0.25 - kSqrt3 / 6.0;
const double kA21 = 0.25 + kSqrt3 / 6.0;
const double kA22 = 0.25;
// b^T A^{-1}, used to form the new step from the converged stage values
const double kD1 = -kSqrt3;
const double kD2 = kSqrt3;

bool finite(std::span<const Complex> v) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace

void Irk4Config::validate() const {
  if (!(h > 0)) throw std::invalid_argument("irk4: step h must be positive");
  if (!(newton_tol > 0)) throw std::invalid_argument("irk4: newton_tol must be positive");
  if (newton_max_iter < 1) throw std::invalid_argument("irk4: newton_max_iter must be >= 1");
  if (!(stop_delta > 0)) throw std::invalid_argument("irk4: stop_delta must be positive");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::completed: return "completed";
    case StopReason::delta_exceeded: return "delta-exceeded";
    case StopReason::newton_failed: return "newton-failed";
  }
  return "unknown";
}

Irk4Stepper::Irk4Stepper(const Grid& g, const ModelParams& p, const Irk4Config& cfg)
    : cfg_(cfg), op_(g, p, cfg.dealias) {
  cfg_.validate();
  const int m = g.spectrum_size();
  m11_.resize(m);
  m12_.resize(m);
  m21_.resize(m);
  m22_.resize(m);
  y1_.resize(m);
  y2_.resize(m);
  f1_.resize(m);
  f2_.resize(m);
  const auto lin = op_.linear_symbol();
  for (int j = 0; j < m; ++j) {
    const Complex z = cfg_.h * lin[j];
    const Complex a = 1.0 - z * kA11;
    const Complex b = -z * kA12;
    const Complex c = -z * kA21;
    const Complex d = 1.0 - z * kA22;
    const Complex inv_det = 1.0 / (a * d - b * c);
    m11_[j] = d * inv_det;
    m12_[j] = -b * inv_det;
    m21_[j] = -c * inv_det;
    m22_[j] = a * inv_det;
  }
}

void Irk4Stepper::step(std::vector<Complex>& state) {
  const std::size_t m = state.size();
  const double h = cfg_.h;
  const double scale = 1.0 / op_.grid().size();
  std::copy(state.begin(), state.end(), y1_.begin());
  std::copy(state.begin(), state.end(), y2_.begin());

  for (int iter = 1; iter <= cfg_.newton_max_iter; ++iter) {
    op_.nonlinear(y1_, f1_);
    op_.nonlinear(y2_, f2_);
    double change = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const Complex r1 = state[j] + h * (kA11 * f1_[j] + kA12 * f2_[j]);
      const Complex r2 = state[j] + h * (kA21 * f1_[j] + kA22 * f2_[j]);
      const Complex n1 = m11_[j] * r1 + m12_[j] * r2;
      const Complex n2 = m21_[j] * r1 + m22_[j] * r2;
      change = std::max({change, std::norm(n1 - y1_[j]), std::norm(n2 - y2_[j])});
      y1_[j] = n1;
      y2_[j] = n2;
    }
    change = std::sqrt(change) * scale;
    if (!std::isfinite(change)) break;
    const bool converged = change < cfg_.newton_tol;
    if (converged) {
      last_iterations_ = iter;
      for (std::size_t j = 0; j < m; ++j) {
        state[j] += kD1 * (y1_[j] - state[j]) + kD2 * (y2_[j] - state[j]);
      }
      return;
    }
  }
  last_iterations_ = cfg_.newton_max_iter;
  std::ostringstream os;
  os << "simplified Newton iteration did not converge in " << cfg_.newton_max_iter
     << " iterations";
  throw NewtonFailed(os.str(), cfg_.newton_max_iter);
}

std::vector<Complex> irk4_step(const std::vector<Complex>& state, const Grid& g,
                               const Irk4Config& cfg, const ModelParams& p) {
  if (!finite(state)) throw std::invalid_argument("irk4_step: non-finite state");
  Irk4Stepper stepper(g, p, cfg);
  auto out = state;
  stepper.step(out);
  return out;
}

double locate_max(const Grid& g, std::span<const double> u, int argmax, bool refine) {
  double x = g.node(argmax);
  if (!refine) return x;
  const int n = g.size();
  const double fm = u[(argmax - 1 + n) % n];
  const double f0 = u[argmax];
  const double fp = u[(argmax + 1) % n];
  const double curv = fm - 2.0 * f0 + fp;
  if (curv < 0) x += 0.5 * (fm - fp) / curv * g.spacing();
  return x;
}

DirectTrajectory run_direct(const Field& u0, const Irk4Config& cfg, const ModelParams& p,
                            double T, const DirectOptions& opts) {
  cfg.validate();
  p.validate();
  if (!(T > 0)) throw std::invalid_argument("run_direct: final time must be positive");
  for (double v : u0.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("run_direct: non-finite initial data");
  }
  const Grid& g = u0.grid;
  Irk4Stepper stepper(g, p, cfg);
  GkdvOperator& op = stepper.op();

  std::vector<Complex> state(g.spectrum_size());
  op.to_spectrum(u0.values, state);
  std::vector<Complex> previous = state;
  std::vector<double> u(g.size());

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  const int stride = std::max(1, opts.record_stride);

  DirectTrajectory traj{
      .records = {}, .snapshots = {}, .stop = StopReason::completed, .message = {},
      .final_state = u0, .final_time = opts.t_start, .steps = 0};
  auto diagnose = [&](double t, int iterations) {
    DirectRecord r;
    r.t = t;
    int imax = 0;
    r.inv = op.invariants(state, &imax);
    if (opts.refine_max) {
      const Extremum e = refine_extremum(g, state, g.node(imax));
      r.x_max = e.x;
      r.inv.linf = std::max(r.inv.linf, std::abs(e.value));
    } else {
      r.x_max = g.node(imax);
    }
    r.tail = tail_magnitude(g, state);
    r.iterations = iterations;
    return r;
  };
  auto take_snapshots = [&](double t) {
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 0.5 * cfg.h) {
      op.to_physical(state, u);
      traj.snapshots.push_back({t, 0.0, Field(g, u)});
      ++next_snap;
    }
  };

  const double t0 = opts.t_start;
  DirectRecord first = diagnose(t0, 0);
  const double e0 = first.inv.energy;
  first.delta = 0.0;
  traj.records.push_back(first);
  take_snapshots(t0);

  const long total = static_cast<long>(std::ceil((T - t0) / cfg.h - 1e-9));
  double t = t0;
  DirectRecord last = first;
  for (long k = 1; k <= total; ++k) {
    previous = state;
    try {
      stepper.step(state);
    } catch (const NewtonFailed& e) {
      traj.stop = StopReason::newton_failed;
      traj.message = e.what();
      break;
    }
    const double t_new = t0 + k * cfg.h;
    DirectRecord r = diagnose(t_new, stepper.last_iterations());
    r.delta = delta_indicator(r.inv.energy, e0);
    if (!(r.delta <= cfg.stop_delta) || !std::isfinite(r.inv.linf)) {
      state = previous;
      traj.stop = StopReason::delta_exceeded;
      std::ostringstream os;
      os << "energy indicator " << r.delta << " exceeded " << cfg.stop_delta << " at t = " << t_new;
      traj.message = os.str();
      break;
    }
    t = t_new;
    traj.steps = k;
    last = r;
    if (k % stride == 0) traj.records.push_back(r);
    take_snapshots(t);
  }
  if (traj.records.back().t != last.t) traj.records.push_back(last);
  op.to_physical(state, u);
  traj.final_state = Field(g, u);
  traj.final_time = t;
  return traj;
}

}  // namespace gkdv
