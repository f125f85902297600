#include <doctest.h>

#include <cmath>
#include <vector>

#include "gkdv/fits.hpp"
#include "gkdv/model.hpp"

using namespace gkdv;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("windows") {
  const FitWindow all = window_last(300);
  CHECK(all.begin == 0);
  CHECK(all.end == 300);
  const FitWindow tail = window_last(5000);
  CHECK(tail.begin == 4000);
  CHECK(tail.size() == 1000);
  const std::vector<double> t = linspace(0, 1, 11);
  const FitWindow after = window_after(t, 0.45);
  CHECK(after.begin == 5);
  CHECK(after.end == 11);
  const FitWindow mid = window_between(t, 0.15, 0.65);
  CHECK(mid.begin == 2);
  CHECK(mid.end == 7);
}

TEST_CASE("linear regression") {
  const std::vector<double> x = linspace(-1, 3, 40);
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const FitResult r = fit_linear(x, y);
  CHECK(r.get("slope") == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.get("intercept") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*r.correlation == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*r.stddev < 1e-12);
  CHECK(r.residual_linf < 1e-13);

  const std::vector<double> flat(5, 2.0);
  CHECK_THROWS_AS(fit_linear(flat, flat), FitError);
  CHECK_THROWS_AS(fit_linear(std::vector<double>{1, 2}, std::vector<double>{1, 2}), FitError);
}

TEST_CASE("regression statistics against a closed form") {
  // four points: slope, r and sigma by hand
  const std::vector<double> x = {0, 1, 2, 3};
  const std::vector<double> y = {1, 3, 2, 5};
  const FitResult r = fit_linear(x, y);
  // sxx = 5, sxy = 5.5, syy = 8.75
  CHECK(r.get("slope") == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(r.get("intercept") == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(*r.correlation == doctest::Approx(5.5 / std::sqrt(5 * 8.75)).epsilon(1e-14));
  // residual sum of squares 8.75 - 5.5^2/5 = 2.7; sigma = sqrt(2.7 / 2 / 5)
  CHECK(*r.stddev == doctest::Approx(std::sqrt(0.27)).epsilon(1e-14));
}

TEST_CASE("Nelder-Mead on a quadratic bowl") {
  auto f = [](std::span<const double> x) {
    return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2);
  };
  const NelderMeadResult r = nelder_mead(f, {{0, 0}, {0.5, 0}, {0, 0.5}});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-8));

  NelderMeadOptions few;
  few.max_iter = 3;
  CHECK_FALSE(nelder_mead(f, {{0, 0}, {0.5, 0}, {0, 0.5}}, few).converged);
  CHECK_THROWS_AS(nelder_mead(f, {{0, 0}, {1, 0}}), FitError);
}

TEST_CASE("blow-up time from manufactured data") {
  const std::vector<double> t = linspace(0, 1.9, 1200);
  std::vector<double> y;
  for (double v : t) y.push_back(std::pow(2 - v, -0.5));

  const FitResult fixed = fit_blowup_time(t, y, -0.5);
  CHECK(std::abs(fixed.get("t_star") - 2) < 1e-8);
  CHECK(std::abs(fixed.get("kappa")) < 1e-8);

  const FitResult free = fit_blowup_time(t, y, std::nullopt);
  CHECK(std::abs(free.get("t_star") - 2) < 1e-8);
  CHECK(std::abs(free.get("alpha") + 0.5) < 1e-8);
  CHECK(free.window.size() == 1000);

  // a window given by t > 1 gives the same answer
  const FitResult after = fit_blowup_time(t, y, std::nullopt, window_after(t, 1.0));
  CHECK(std::abs(after.get("t_star") - 2) < 1e-8);
  CHECK(std::abs(after.get("alpha") + 0.5) < 1e-8);

  // deterministic
  const FitResult again = fit_blowup_time(t, y, std::nullopt);
  CHECK(again.get("t_star") == free.get("t_star"));
  CHECK(again.iterations == free.iterations);

  std::vector<double> bad = y;
  bad[1100] = -1;
  CHECK_THROWS_AS(fit_blowup_time(t, bad, -0.5), FitError);
}

TEST_CASE("fits are invariant under re-indexing of the window") {
  // the same samples embedded at different offsets of a longer series
  const std::vector<double> core = linspace(0.5, 1.8, 400);
  std::vector<double> t = linspace(0, 0.4, 77);
  const std::size_t offset = t.size();
  t.insert(t.end(), core.begin(), core.end());
  std::vector<double> y;
  for (double v : t) y.push_back(1.7 * std::pow(2.3 - v, -0.4));
  std::vector<double> yc(y.begin() + offset, y.end());

  const FitResult a = fit_blowup_time(core, yc, std::nullopt, FitWindow{0, core.size()});
  const FitResult b = fit_blowup_time(t, y, std::nullopt, FitWindow{offset, t.size()});
  CHECK(a.get("t_star") == b.get("t_star"));
  CHECK(a.get("alpha") == b.get("alpha"));
  CHECK(std::abs(a.get("t_star") - 2.3) < 1e-8);
  CHECK(std::abs(a.get("kappa") - std::log(1.7)) < 1e-8);
}

TEST_CASE("linear law for L") {
  const std::vector<double> t = linspace(0, 4, 100);
  std::vector<double> L;
  for (double v : t) L.push_back(0.74 - 0.167 * v);
  const FitResult r = fit_L_linear(t, L, window_after(t, 2.0));
  CHECK(r.get("m") == doctest::Approx(-0.167).epsilon(1e-13));
  CHECK(r.get("L0") == doctest::Approx(0.74).epsilon(1e-13));
  CHECK(r.get("t_star") == doctest::Approx(0.74 / 0.167).epsilon(1e-13));

  std::vector<double> growing;
  for (double v : t) growing.push_back(1 + 0.1 * v);
  const FitResult g = fit_L_linear(t, growing, window_after(t, 2.0));
  CHECK(std::isnan(g.get("t_star")));
  CHECK(g.flags.size() == 1);
}

TEST_CASE("power law for L") {
  const std::vector<double> t = linspace(0, 0.999, 2000);
  std::vector<double> L;
  for (double v : t) L.push_back(std::pow(1 - v, 1.0 / 3));
  const FitResult r = fit_L_powerlaw(t, L, 1.0);
  CHECK(r.get("gamma") == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(std::abs(r.get("C")) < 1e-12);
  CHECK(r.window.size() <= 1000);

  // the saturation cut drops samples with ln(t* - t) below the floor
  const FitResult cut = fit_L_powerlaw(t, L, 1.0, FitWindow{0, t.size()}, std::log(0.01));
  for (std::size_t i = cut.window.begin; i < cut.window.end; ++i) CHECK(1.0 - t[i] >= 0.01 - 1e-15);
  CHECK(cut.get("gamma") == doctest::Approx(1.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS(fit_L_powerlaw(t, L, 0.5), FitError);
}

TEST_CASE("position of the maximum") {
  const std::vector<double> t = linspace(0, 0.9, 500);
  std::vector<double> xm, L, x_lin;
  for (double v : t) {
    xm.push_back(1.6683 * std::pow(1 - v, -0.9117));
    L.push_back(std::pow(1 - v, 1.0 / 3));
    x_lin.push_back(1.8656 - 3.3824 * L.back());
  }
  const FitResult p = fit_xm(xm, t, XmMode::powerlaw, FitWindow{0, t.size()}, 1.0);
  CHECK(p.get("gamma2") == doctest::Approx(-0.9117).epsilon(1e-12));
  CHECK(p.get("C2") == doctest::Approx(1.6683).epsilon(1e-12));
  const FitResult q = fit_xm(x_lin, L, XmMode::linear_in_L, window_between(L, 0, 0.5));
  CHECK(q.get("gamma") == doctest::Approx(-3.3824).epsilon(1e-12));
  CHECK(q.get("xm0") == doctest::Approx(1.8656).epsilon(1e-12));
}

TEST_CASE("epsilon law") {
  const std::vector<double> eps = {0.1, 0.08, 0.06, 0.05, 0.04, 0.03};
  std::vector<double> ts;
  for (double e : eps) ts.push_back(2 * std::exp(3 * e));
  const EpsilonLawResult r = fit_epsilon_law(eps, ts, 1.0);
  CHECK(r.exponential.get("gamma") == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.exponential.get("delta") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(r.exponential.get("t_star0") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(*r.exponential.correlation > *r.algebraic.correlation);
  CHECK_THROWS_AS(fit_epsilon_law(std::vector<double>{0.1, 0.05}, std::vector<double>{2, 1.5}, 1.0),
                  FitError);
}

TEST_CASE("scaling factor from norms of a manufactured self-similar family") {
  // u = lambda^{-2/n} Q(x / lambda): ||u||_inf ~ lambda^{-2/n},
  // ||u_x||_2 ~ lambda^{-2/n - 1/2}; the norms come from sampled fields
  const ModelParams p{5, 1.0};
  const Grid g = make_grid(1 << 12, 20.0);
  std::vector<double> t, lambda, linf, l2;
  for (int k = 0; k < 12; ++k) {
    const double tk = 0.08 * k;
    const double lam = std::pow(1 - tk, 1.0 / 3);
    const Field u = Field::sample(g, [&](double x) {
      return std::pow(lam, -2.0 / p.n) * soliton_profile(1.0, x / lam, p);
    });
    const Invariants inv = invariants(u, p);
    t.push_back(tk);
    lambda.push_back(lam);
    linf.push_back(inv.linf);
    l2.push_back(inv.l2_ux);
  }
  const ScalingSeries a = scaling_from_norms(t, l2, NormKind::l2ux, p);
  const ScalingSeries b = scaling_from_norms(t, linf, NormKind::linf, p);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(std::abs(a.L[k] - lambda[k]) < 1e-8);
    // grid maximum: the peak sits on a node for every lambda
    CHECK(std::abs(b.L[k] - lambda[k]) < 1e-8);
  }
  CHECK_THROWS_AS(scaling_from_norms(t, std::vector<double>(t.size(), 0.0), NormKind::linf, p),
                  FitError);
}

TEST_CASE("blow-up exponents") {
  const BlowupExponents e4 = blowup_exponents(ModelParams{4, 0.1});
  CHECK(e4.L == 1.0);
  CHECK(e4.linf == -0.5);
  CHECK(e4.l2ux_sq == -2.0);
  const BlowupExponents e5 = blowup_exponents(ModelParams{5, 0.1});
  CHECK(e5.L == doctest::Approx(1.0 / 3));
  CHECK(e5.linf == doctest::Approx(-2.0 / 15));
  CHECK(e5.l2ux_sq == doctest::Approx(-(4.0 / 5 + 1) / 3));
  CHECK_THROWS(blowup_exponents(ModelParams{3, 0.1}));
}
