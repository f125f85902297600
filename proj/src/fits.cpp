#include "gkdv/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gkdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_window(std::size_t n, FitWindow w, const char* what) {
  if (w.begin > w.end || w.end > n) {
    std::ostringstream os;
    os << what << ": window [" << w.begin << ", " << w.end << ") outside data of length " << n;
    throw FitError(os.str());
  }
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw FitError(std::string(what) + ": series lengths differ");
}

void fill_residuals(FitResult& r, std::span<const double> residuals) {
  double s = 0, m = 0;
  for (double e : residuals) {
    s += e * e;
    m = std::max(m, std::abs(e));
  }
  r.residual_l2 = std::sqrt(s);
  r.residual_linf = m;
}

}  // namespace

FitWindow window_last(std::size_t n, std::size_t count) {
  return {n > count ? n - count : 0, n};
}

FitWindow window_after(std::span<const double> t, double t_min) {
  std::size_t b = 0;
  while (b < t.size() && !(t[b] > t_min)) ++b;
  return {b, t.size()};
}

FitWindow window_between(std::span<const double> x, double lo, double hi) {
  std::size_t b = 0;
  while (b < x.size() && !(x[b] > lo && x[b] < hi)) ++b;
  std::size_t e = b;
  while (e < x.size() && x[e] > lo && x[e] < hi) ++e;
  return {b, e};
}

double FitResult::get(const std::string& name) const {
  for (const auto& [k, v] : params) {
    if (k == name) return v;
  }
  throw std::out_of_range("fit result has no parameter '" + name + "'");
}

bool FitResult::has(const std::string& name) const {
  return std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == name; });
}

void FitResult::set(const std::string& name, double value) {
  for (auto& [k, v] : params) {
    if (k == name) {
      v = value;
      return;
    }
  }
  params.emplace_back(name, value);
}

const char* to_string(NormKind k) { return k == NormKind::l2ux ? "l2ux" : "linf"; }

ScalingSeries scaling_from_norms(std::span<const double> t, std::span<const double> norm,
                                 NormKind kind, const ModelParams& p) {
  p.validate();
  check_sizes(t.size(), norm.size(), "scaling_from_norms");
  if (norm.empty()) throw FitError("scaling_from_norms: empty series");
  const double n0 = norm.front();
  if (!(n0 > 0)) throw FitError("scaling_from_norms: initial norm must be positive");
  const double power = kind == NormKind::l2ux ? 1.0 / (2.0 / p.n + 0.5) : 0.5 * p.n;
  ScalingSeries s;
  s.t.assign(t.begin(), t.end());
  s.L.resize(norm.size());
  for (std::size_t i = 0; i < norm.size(); ++i) s.L[i] = std::pow(n0 / norm[i], power);
  return s;
}

ScalingSeries scaling_from_norms(const DirectTrajectory& traj, NormKind kind, const ModelParams& p) {
  std::vector<double> t, norm;
  for (const auto& r : traj.records) {
    t.push_back(r.t);
    norm.push_back(kind == NormKind::l2ux ? r.inv.l2_ux : r.inv.linf);
  }
  return scaling_from_norms(t, norm, kind, p);
}

FitResult fit_linear(std::span<const double> x, std::span<const double> y) {
  return fit_linear(x, y, FitWindow{0, x.size()});
}

FitResult fit_linear(std::span<const double> x, std::span<const double> y, FitWindow w) {
  check_sizes(x.size(), y.size(), "fit_linear");
  check_window(x.size(), w, "fit_linear");
  const std::size_t n = w.size();
  if (n < 3) throw FitError("fit_linear: need at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw FitError("fit_linear: degenerate abscissa (all x equal)");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  std::vector<double> res(n);
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    res[i] = y[w.begin + i] - (slope * x[w.begin + i] + intercept);
    sse += res[i] * res[i];
  }
  FitResult r;
  r.params = {{"slope", slope}, {"intercept", intercept}};
  fill_residuals(r, res);
  r.correlation = syy > 0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 1.0;
  r.stddev = std::sqrt(sse / (n - 2.0) / sxx);
  r.window = w;
  return r;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& opts) {
  const std::size_t dim = simplex.size() - 1;
  if (simplex.size() < 2) throw FitError("nelder_mead: empty simplex");
  for (const auto& v : simplex) {
    if (v.size() != dim) throw FitError("nelder_mead: simplex needs dim + 1 vertices of size dim");
  }
  auto eval = [&](std::span<const double> x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  std::vector<double> fv(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = eval(simplex[i]);
  std::vector<std::size_t> order(simplex.size());

  NelderMeadResult out;
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double xspread = 0, fspread = 0, xscale = 0;
    for (double c : simplex[best]) xscale = std::max(xscale, std::abs(c));
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        xspread = std::max(xspread, std::abs(simplex[i][d] - simplex[best][d]));
      }
      if (std::isfinite(fv[i])) {
        fspread = std::max(fspread, std::abs(fv[i] - fv[best]));
      } else {
        fspread = kInf;
      }
    }
    out.iterations = iter;
    if (xspread <= opts.tol * (1.0 + xscale) && fspread <= opts.tol * (1.0 + std::abs(fv[best]))) {
      out.converged = true;
      break;
    }
    if (iter == opts.max_iter) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d] / dim;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      xr[d] = centroid[d] + opts.reflect * (centroid[d] - simplex[worst][d]);
    }
    const double fr = eval(xr);
    if (fr < fv[best]) {
      for (std::size_t d = 0; d < dim; ++d) {
        xe[d] = centroid[d] + opts.expand * (xr[d] - centroid[d]);
      }
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // contraction, outside when the reflected point improved on the worst
    const bool outside = fr < fv[worst];
    const auto& from = outside ? xr : simplex[worst];
    for (std::size_t d = 0; d < dim; ++d) {
      xc[d] = centroid[d] + opts.contract * (from[d] - centroid[d]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[i][d] = simplex[best][d] + opts.shrink * (simplex[i][d] - simplex[best][d]);
      }
      fv[i] = eval(simplex[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  out.x = simplex[it - fv.begin()];
  out.value = *it;
  return out;
}

FitResult fit_blowup_time(std::span<const double> t, std::span<const double> y,
                          std::optional<double> alpha) {
  return fit_blowup_time(t, y, alpha, window_last(t.size()));
}

FitResult fit_blowup_time(std::span<const double> t, std::span<const double> y,
                          std::optional<double> alpha, FitWindow w,
                          const NelderMeadOptions& opts) {
  check_sizes(t.size(), y.size(), "fit_blowup_time");
  check_window(t.size(), w, "fit_blowup_time");
  const std::size_t n = w.size();
  if (n < 3) throw FitError("fit_blowup_time: need at least 3 points in the window");
  std::vector<double> tw(t.begin() + w.begin, t.begin() + w.end);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = y[w.begin + i];
    if (!(v > 0)) throw FitError("fit_blowup_time: data must be positive");
    ly[i] = std::log(v);
    if (i > 0 && !(tw[i] > tw[i - 1])) throw FitError("fit_blowup_time: t must be strictly increasing");
  }
  const double tmin = tw.front();
  const double tmax = tw.back();
  const double span = tmax - tmin;

  auto residual = [&](double ts, double kappa, double a, std::vector<double>* out) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - a * std::log(ts - tw[i]) - kappa;
      if (out) (*out)[i] = r;
      s += r * r;
    }
    return std::sqrt(s);
  };

  // seeds: regression of ln y against ln(t* - t) at the first t* seed
  const double ts0 = tmax + 0.01 * span;
  const double ts1 = tmax + 0.1 * span;
  std::vector<double> lx(n);
  for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(ts0 - tw[i]);
  double a0, k0;
  if (alpha) {
    a0 = *alpha;
    k0 = 0;
    for (std::size_t i = 0; i < n; ++i) k0 += (ly[i] - a0 * lx[i]) / n;
  } else {
    const FitResult lin = fit_linear(lx, ly);
    a0 = lin.get("slope");
    k0 = lin.get("intercept");
  }
  const double dk = 0.1 * std::max(1.0, std::abs(k0));

  NelderMeadResult nm;
  if (alpha) {
    const double a = *alpha;
    auto obj = [&](std::span<const double> x) {
      if (!(x[0] > tmax)) return kInf;
      return residual(x[0], x[1], a, nullptr);
    };
    nm = nelder_mead(obj, {{ts0, k0}, {ts1, k0}, {ts0, k0 + dk}}, opts);
  } else {
    const double da = 0.1 * std::max(0.1, std::abs(a0));
    auto obj = [&](std::span<const double> x) {
      if (!(x[0] > tmax)) return kInf;
      return residual(x[0], x[1], x[2], nullptr);
    };
    nm = nelder_mead(obj, {{ts0, k0, a0}, {ts1, k0, a0}, {ts0, k0 + dk, a0}, {ts0, k0, a0 + da}},
                     opts);
  }
  if (!nm.converged) {
    std::ostringstream os;
    os << "fit_blowup_time: simplex did not converge in " << opts.max_iter << " iterations";
    throw FitError(os.str());
  }
  FitResult r;
  const double a = alpha ? *alpha : nm.x[2];
  r.params = {{"t_star", nm.x[0]}, {"kappa", nm.x[1]}, {"alpha", a}};
  std::vector<double> res(n);
  residual(nm.x[0], nm.x[1], a, &res);
  fill_residuals(r, res);
  r.window = w;
  r.iterations = nm.iterations;
  if (!alpha) r.flags.push_back("alpha-free");
  return r;
}

FitResult fit_L_linear(std::span<const double> t, std::span<const double> L, FitWindow w) {
  FitResult r = fit_linear(t, L, w);
  const double m = r.get("slope");
  const double l0 = r.get("intercept");
  r.params = {{"m", m}, {"L0", l0}, {"t_star", m < 0 ? -l0 / m : kNaN}};
  if (!(m < 0)) r.flags.push_back("no-blowup");
  return r;
}

FitResult fit_L_powerlaw(std::span<const double> t, std::span<const double> L, double t_star,
                         double saturation_floor) {
  return fit_L_powerlaw(t, L, t_star, window_last(t.size()), saturation_floor);
}

FitResult fit_L_powerlaw(std::span<const double> t, std::span<const double> L, double t_star,
                         FitWindow w, double saturation_floor) {
  check_sizes(t.size(), L.size(), "fit_L_powerlaw");
  check_window(t.size(), w, "fit_L_powerlaw");
  std::vector<double> x, y;
  std::size_t first = w.end, last = w.begin;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    if (!(t_star > t[i])) throw FitError("fit_L_powerlaw: t* must exceed every fitted time");
    const double lx = std::log(t_star - t[i]);
    if (lx < saturation_floor) continue;
    if (!(L[i] > 0)) throw FitError("fit_L_powerlaw: L must be positive");
    x.push_back(lx);
    y.push_back(std::log(L[i]));
    first = std::min(first, i);
    last = std::max(last, i + 1);
  }
  if (x.size() < 3) throw FitError("fit_L_powerlaw: empty window after the saturation cut");
  FitResult r = fit_linear(x, y);
  const double gamma = r.get("slope");
  const double c = r.get("intercept");
  r.params = {{"gamma", gamma}, {"C", c}, {"t_star", t_star}};
  r.window = {first, last};
  return r;
}

FitResult fit_xm(std::span<const double> x_m, std::span<const double> abscissa, XmMode mode,
                 FitWindow w, double t_star) {
  check_sizes(x_m.size(), abscissa.size(), "fit_xm");
  check_window(x_m.size(), w, "fit_xm");
  if (mode == XmMode::linear_in_L) {
    FitResult r = fit_linear(abscissa, x_m, w);
    r.params = {{"gamma", r.get("slope")}, {"xm0", r.get("intercept")}};
    return r;
  }
  std::vector<double> x, y;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    if (!(t_star > abscissa[i])) throw FitError("fit_xm: t* must exceed every fitted time");
    if (!(x_m[i] > 0)) throw FitError("fit_xm: power-law mode needs positive x_m");
    x.push_back(std::log(t_star - abscissa[i]));
    y.push_back(std::log(x_m[i]));
  }
  FitResult r = fit_linear(x, y);
  r.params = {{"gamma2", r.get("slope")}, {"C2", std::exp(r.get("intercept"))}, {"t_star", t_star}};
  r.window = w;
  return r;
}

EpsilonLawResult fit_epsilon_law(std::span<const double> eps, std::span<const double> t_star,
                                 double t_c) {
  check_sizes(eps.size(), t_star.size(), "fit_epsilon_law");
  if (eps.size() < 3) throw FitError("fit_epsilon_law: need at least 3 eps values");
  if (!(t_c > 0)) throw FitError("fit_epsilon_law: t_c must be positive");
  std::vector<double> y(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(t_star[i] > 0) || !(eps[i] > 0)) throw FitError("fit_epsilon_law: eps and t* must be positive");
    y[i] = std::log(t_star[i] / t_c);
  }
  EpsilonLawResult out;
  out.exponential = fit_linear(eps, y);
  const double gamma = out.exponential.get("slope");
  const double delta = out.exponential.get("intercept");
  out.exponential.params = {{"gamma", gamma}, {"delta", delta}, {"t_star0", t_c * std::exp(delta)}};

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (t_star[i] > t_c) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(t_star[i] - t_c));
    }
  }
  if (lx.size() == eps.size()) {
    out.algebraic = fit_linear(lx, ly);
  } else {
    out.algebraic.flags.push_back("t-star-below-tc");
    out.algebraic.correlation = kNaN;
  }
  return out;
}

BlowupExponents blowup_exponents(const ModelParams& p) {
  p.validate();
  if (p.n < 4) throw std::invalid_argument("blowup_exponents: no blow-up for n < 4");
  const double n = p.n;
  const double l = p.n == 4 ? 1.0 : 1.0 / 3.0;
  return {l, -2.0 / n * l, -(4.0 / n + 1.0) * l};
}

}  // namespace gkdv
