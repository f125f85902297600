#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "gkdv/model.hpp"
#include "gkdv/warnings.hpp"

using namespace gkdv;

TEST_CASE("soliton profile") {
  const ModelParams p{4, 1.0};
  const Grid g = make_grid(1 << 10, 10.0);
  const Field q = soliton(1.0, 0.0, p, g);
  CHECK(q.max_abs() == doctest::Approx(std::pow(15.0, 0.25)).epsilon(1e-14));
  CHECK(soliton_profile(1.0, 0.0, p) == doctest::Approx(1.9679896712654303).epsilon(1e-15));

  // Q_c(z) = c^{1/n} Q(sqrt(c) z)
  for (double c : {0.5, 2.0, 4.0}) {
    for (double z : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
      const double lhs = soliton_profile(c, z, p);
      const double rhs = std::pow(c, 1.0 / p.n) * soliton_profile(1.0, std::sqrt(c) * z, p);
      CHECK(std::abs(lhs - rhs) <= 1e-14 * std::max(1.0, rhs));
    }
  }
  CHECK_THROWS_AS(soliton(0.0, 0.0, p, g), std::invalid_argument);
}

TEST_CASE("soliton warns when not periodic on the domain") {
  std::vector<std::string> seen;
  auto old = set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
  soliton(1.0, 0.0, ModelParams{4, 1.0}, make_grid(256, 1.0));
  set_warning_handler(old);
  CHECK(seen.size() == 1);
}

TEST_CASE("soliton invariants") {
  const Grid g = make_grid(1 << 12, 10.0);
  const ModelParams p4{4, 1.0};
  const Invariants i4 = invariants(soliton(1.0, 0.0, p4, g), p4);
  CHECK(i4.mass == doctest::Approx(6.0837).epsilon(0.5e-4 / 6.0837));
  CHECK(std::abs(i4.energy) < 1e-10);

  const ModelParams p5{5, 1.0};
  const Invariants i5 = invariants(soliton(1.0, 0.0, p5, g), p5);
  // quadrature of the closed-form profile: E = 0.2763223959; the often quoted
  // 0.5526 is the same functional without the factor 1/2
  CHECK(i5.energy == doctest::Approx(0.2763223959243).epsilon(1e-11));
  CHECK(std::round(2 * i5.energy * 1e4) / 1e4 == doctest::Approx(0.5526));
  CHECK(std::round(i5.mass * 1e4) / 1e4 == doctest::Approx(4.9738));

  // translation invariance
  const Invariants shifted = invariants(soliton(1.0, 4.3, p5, g), p5);
  CHECK(std::abs(shifted.mass - i5.mass) < 1e-12 * i5.mass);
  CHECK(std::abs(shifted.energy - i5.energy) < 1e-12 * i5.energy);

  const Invariants z = invariants(Field(g), p5);
  CHECK(z.mass == 0.0);
  CHECK(z.energy == 0.0);
  CHECK(z.linf == 0.0);
  CHECK(z.l2_ux == 0.0);
}

TEST_CASE("energy indicator") {
  CHECK(delta_indicator(2.0, 2.0) == 0.0);
  CHECK(delta_indicator(1.001, 1.0) == doctest::Approx(1e-3).epsilon(1e-10));
  CHECK(delta_indicator(1e-9, 0.0) == doctest::Approx(1e-9));
  CHECK(delta_indicator(1e-9 + 5e-11, 5e-11) == doctest::Approx(1e-9));
}

TEST_CASE("Hopf critical time") {
  auto round4 = [](double v) { return std::round(v * 1e4) / 1e4; };
  CHECK(round4(hopf_critical_time(1.0, ModelParams{4, 0.1})) == doctest::Approx(0.6007));
  CHECK(round4(hopf_critical_time(0.3, ModelParams{4, 0.1})) == doctest::Approx(74.1577));
  CHECK(round4(hopf_critical_time(1.0, ModelParams{5, 0.1})) == doctest::Approx(0.5341));
  CHECK(round4(hopf_critical_time(0.3, ModelParams{5, 0.1})) == doctest::Approx(219.8131));
  for (int n : {1, 2, 4, 5, 7}) {
    const ModelParams p{n, 1.0};
    const double ref = hopf_critical_time(1.0, p);
    for (double b : {0.2, 0.7, 3.0}) {
      CHECK(std::abs(hopf_critical_time(b, p) * std::pow(b, n) / ref - 1) < 1e-12);
    }
  }
  CHECK_THROWS_AS(hopf_critical_time(0.0, ModelParams{4, 1.0}), std::invalid_argument);
}

TEST_CASE("right-hand side split") {
  // sech(8 pi) ~ 2e-11, so the field is periodic to the tolerance below
  const Grid g = make_grid(512, 8.0);
  const ModelParams p{4, 1.0};
  const Field f = Field::sample(g, [](double x) { return 0.8 / std::cosh(x); });
  const RhsSplit s = rhs_split(f, p);
  // k = 1 sits at index D
  CHECK(std::abs(s.linear[8] - Complex(0, 1)) < 1e-15);
  for (const auto& z : s.linear) CHECK(z.real() == 0.0);
  CHECK(std::abs(s.nonlinear[0]) < 1e-12);

  const Field k = Field::sample(g, [](double) { return 1.3; });
  for (const auto& z : rhs_split(k, p).nonlinear) CHECK(std::abs(z) < 1e-10);

  // inverse of F equals -u^n u_x evaluated pointwise
  const int n = g.size();
  RealTransform fft(n);
  std::vector<Complex> half(s.nonlinear.begin(), s.nonlinear.begin() + g.spectrum_size());
  std::vector<double> back(n);
  fft.inverse(half, back);
  const Field ux = spectral_derivative(f, 1);
  double err = 0;
  for (int j = 0; j < n; ++j) {
    err = std::max(err, std::abs(back[j] + std::pow(f.values[j], 4) * ux.values[j]));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS((ModelParams{0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{4, -0.1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{4, 0.1}.validate()));
}
