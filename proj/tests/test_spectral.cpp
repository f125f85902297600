#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gkdv/model.hpp"
#include "gkdv/spectral.hpp"

using namespace gkdv;
using std::numbers::pi;

namespace {

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// sixth-order centred third derivative of a periodic sample vector
std::vector<double> fd3_order6(const std::vector<double>& u, double h) {
  // weights for offsets 1..4 (antisymmetric)
  const double w[4] = {-488.0 / 240, 338.0 / 240, -72.0 / 240, 7.0 / 240};
  const int n = static_cast<int>(u.size());
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int m = 1; m <= 4; ++m) s += w[m - 1] * (u[(j + m) % n] - u[(j - m + n) % n]);
    d[j] = s / (h * h * h);
  }
  return d;
}

}  // namespace

TEST_CASE("grid layout") {
  const Grid g = make_grid(4, 1.0);
  CHECK(g.node(0) == doctest::Approx(-pi));
  CHECK(g.node(1) == doctest::Approx(-pi / 2));
  CHECK(g.node(2) == doctest::Approx(0.0));
  CHECK(g.node(3) == doctest::Approx(pi / 2));
  CHECK(g.wavenumber(0) == 0.0);
  CHECK(g.wavenumber(1) == 1.0);
  CHECK(g.wavenumber(2) == -2.0);
  CHECK(g.wavenumber(3) == -1.0);

  const Grid g10 = make_grid(1 << 10, 10.0);
  CHECK(g10.spacing() == doctest::Approx(20 * pi / 1024).epsilon(1e-15));
  CHECK(g10.node(0) == doctest::Approx(-10 * pi).epsilon(1e-15));

  const Grid g6 = make_grid(6, 2.0);
  const auto k = g6.wavenumbers();
  CHECK(*std::max_element(k.begin(), k.end()) == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_grid(5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
}

TEST_CASE("wavenumbers are antisymmetric apart from Nyquist") {
  const Grid g = make_grid(16, 3.0);
  for (int j = 1; j < 8; ++j) CHECK(g.wavenumber(j) == -g.wavenumber(16 - j));
  CHECK(g.wavenumber(8) == doctest::Approx(-8 / 3.0));
}

TEST_CASE("round trip, Hermitian symmetry and Parseval") {
  const Grid g = make_grid(256, 2.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Field f(g);
  for (auto& v : f.values) v = nd(rng);
  const auto c = f.coefficients();
  const int n = g.size();
  for (int j = 1; j < n / 2; ++j) {
    CHECK(std::abs(c[j] - std::conj(c[n - j])) < 1e-12);
  }
  CHECK(std::abs(c[0].imag()) < 1e-13);
  CHECK(std::abs(c[n / 2].imag()) < 1e-13);

  double energy_x = 0, energy_k = 0;
  for (double v : f.values) energy_x += v * v;
  for (const auto& z : c) energy_k += std::norm(z);
  energy_x *= g.spacing();
  energy_k *= g.spacing() / n;
  CHECK(std::abs(energy_x - energy_k) / energy_x < 1e-12);

  RealTransform fft(n);
  std::vector<Complex> half(g.spectrum_size());
  std::vector<double> back(n);
  fft.forward(f.values, half);
  fft.inverse(half, back);
  CHECK(max_diff(back, f.values) <= 100 * 2.2e-16 * f.max_abs());
}

TEST_CASE("spectral derivative of single modes and constants") {
  const Grid g = make_grid(64, 1.0);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  const Field c = Field::sample(g, [](double x) { return std::cos(x); });
  CHECK(max_diff(spectral_derivative(s, 1).values, c.values) < 1e-14);

  const Field k = Field::sample(g, [](double) { return 3.5; });
  for (int m = 1; m <= 4; ++m) CHECK(spectral_derivative(k, m).max_abs() < 1e-14);

  CHECK_THROWS_AS(spectral_derivative(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(spectral_derivative(s, 5), std::invalid_argument);
}

TEST_CASE("third derivative agrees with a sixth-order finite-difference oracle") {
  auto errors = [](int n) {
    const Grid g = make_grid(n, 1.0);
    const Field f = Field::sample(g, [](double x) { return std::exp(std::sin(x)); });
    const auto fd = fd3_order6(f.values, g.spacing());
    return max_diff(spectral_derivative(f, 3).values, fd);
  };
  // the difference is the FD truncation error, O(h^6); finer grids hit
  // round-off in the 1/h^3 stencil
  const double e128 = errors(128);
  const double e256 = errors(256);
  const double rate = std::log2(e128 / e256);
  CHECK(rate > 5.5);
  CHECK(rate < 6.5);
  CHECK(e256 < 2e-8);
}

TEST_CASE("derivative is linear and composes") {
  const Grid g = make_grid(128, 2.0);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const Field h = Field::sample(g, [](double x) { return std::sin(x / 2) / (2 + std::cos(x / 2)); });
  Field combo(g);
  for (int j = 0; j < g.size(); ++j) combo.values[j] = 2.5 * f.values[j] - 0.75 * h.values[j];
  const Field dc = spectral_derivative(combo, 3);
  const Field df = spectral_derivative(f, 3);
  const Field dh = spectral_derivative(h, 3);
  double err = 0, scale = 0;
  for (int j = 0; j < g.size(); ++j) {
    err = std::max(err, std::abs(dc.values[j] - (2.5 * df.values[j] - 0.75 * dh.values[j])));
    scale = std::max(scale, std::abs(dc.values[j]));
  }
  CHECK(err / scale < 1e-12);

  const Field d11 = spectral_derivative(spectral_derivative(f, 1), 1);
  CHECK(max_diff(d11.values, spectral_derivative(f, 2).values) < 1e-12);
}

TEST_CASE("tail magnitude") {
  const Grid g = make_grid(1 << 10, 10.0);
  CHECK(tail_magnitude(Field(g)) == 0.0);
  const Field s = Field::sample(g, [](double x) {
    const double c = 1 / std::cosh(x);
    return c * c;
  });
  CHECK(tail_magnitude(s) < 1e-13);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1, 1);
  Field noise(g);
  for (auto& v : noise.values) v = ud(rng);
  CHECK(tail_magnitude(noise) > 0.1);
}

TEST_CASE("resample") {
  const Grid a = make_grid(1 << 12, 10.0);
  const ModelParams p{4, 1.0};
  const Field q = soliton(1.0, 0.0, p, a);
  const Field same = resample(q, a);
  CHECK(same.values == q.values);

  const Grid b = make_grid(1 << 13, 10.0);
  const Field qb = resample(q, b);
  const Field exact = soliton(1.0, 0.0, p, b);
  CHECK(max_diff(qb.values, exact.values) < 1e-8);

  // a ramp is reproduced exactly away from the periodic seam
  const Grid coarse = make_grid(32, 1.0);
  const Field ramp = Field::sample(coarse, [](double x) { return 0.3 * x + 1.0; });
  const Grid fine = make_grid(64, 0.5);
  const Field r = resample(ramp, fine);
  for (int j = 0; j < fine.size(); ++j) {
    CHECK(r.values[j] == doctest::Approx(0.3 * fine.node(j) + 1.0).epsilon(1e-13));
  }
}

TEST_CASE("dealias zeroes the upper third") {
  std::vector<Complex> c(13, Complex(1, 1));
  dealias(c);
  const int cut = static_cast<int>(c.size());
  int kept = 0;
  for (int j = 0; j < cut; ++j) kept += std::abs(c[j]) > 0;
  CHECK(kept < cut);
  CHECK(kept >= 8);
  CHECK(std::abs(c.back()) == 0.0);
}

TEST_CASE("extremum of the interpolant between nodes") {
  const Grid g = make_grid(256, 2.0);
  const double x0 = 0.0123;
  const Field f = Field::sample(g, [&](double x) { return 1.5 * std::exp(-(x - x0) * (x - x0)); });
  RealTransform fft(g.size());
  std::vector<Complex> c(g.spectrum_size());
  fft.forward(f.values, c);
  const Extremum e = refine_extremum(g, c, g.node(g.nearest_node(x0)));
  CHECK(e.x == doctest::Approx(x0).epsilon(1e-12));
  CHECK(e.value == doctest::Approx(1.5).epsilon(1e-14));
  // a minimum is found as well
  for (auto& z : c) z = -z;
  CHECK(refine_extremum(g, c, g.node(g.nearest_node(x0))).value == doctest::Approx(-1.5).epsilon(1e-14));
}
