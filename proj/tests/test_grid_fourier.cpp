#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "biphoton/amplitude.hpp"
#include "biphoton/fourier.hpp"
#include "biphoton/grid.hpp"

using namespace biphoton;

namespace {

Grid make_gaussian_grid(Eigen::Index n, double span_p, double span_m, double sp, double sm) {
  Grid g;
  g.domain = GridDomain::Frequency;
  g.axis_plus = Axis<double>::centered(span_p, n);
  g.axis_minus = Axis<double>::centered(span_m, n);
  g.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = g.axis_plus.value(i) / sp;
      const double b = g.axis_minus.value(j) / sm;
      g.values(i, j) = std::exp(-a * a - b * b);
    }
  return g;
}

Curve modulus_cut_plus(const Grid& g) {
  Curve c;
  c.x = g.axis_plus.values();
  c.y.resize(g.n_plus());
  const Eigen::Index j0 = g.n_minus() / 2;
  for (Eigen::Index i = 0; i < g.n_plus(); ++i) c.y[i] = std::abs(g.values(i, j0));
  return c;
}

}  // namespace

TEST_CASE("grid spec validation") {
  GridSpec ok;
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS((GridSpec{100, 128, 0.35, 3.0}).validate(), InvalidInputError);
  CHECK_THROWS_AS((GridSpec{32, 128, 0.35, 3.0}).validate(), InvalidInputError);
  CHECK_THROWS_AS((GridSpec{128, 128, -1.0, 3.0}).validate(), InvalidInputError);

  PumpSpec pump;
  CrystalSpec crystal;
  CHECK(GridSpec{1024, 1024, 0.35, 3.0}.resolution_warnings(pump, crystal).empty());
  CHECK(GridSpec{1024, 1024, 0.05, 3.0}.resolution_warnings(pump, crystal).size() == 1);
  CHECK(GridSpec{1024, 1024, 0.35, 0.5}.resolution_warnings(pump, crystal).size() == 1);
}

TEST_CASE("centered transform against the direct sum") {
  // one row/column of a small grid vs a brute-force kernel sum
  const Eigen::Index n = 64;
  Grid g;
  g.domain = GridDomain::Frequency;
  g.axis_plus = Axis<double>::centered(0.9, n);
  g.axis_minus = Axis<double>::centered(2.2, n);
  g.values.resize(n, n);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g.values(i, j) = {u(rng), u(rng)};

  const Grid t = to_time_domain(g);
  // direct evaluation at a handful of output samples
  for (const auto [a, b] : {std::pair<int, int>{0, 0}, {7, 50}, {32, 32}, {63, 1}}) {
    std::complex<double> acc(0, 0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double phase = -(g.axis_plus.value(i) * t.axis_plus.value(a) +
                               g.axis_minus.value(j) * t.axis_minus.value(b));
        acc += g.values(i, j) * std::polar(1.0, phase);
      }
    acc *= g.cell_area() / two_pi;
    CHECK(std::abs(acc - t.values(a, b)) < 1e-10);
  }
}

TEST_CASE("round trip and Parseval") {
  Grid g = make_gaussian_grid(128, 0.35, 3.0, 0.03, 0.6);
  const Grid t = to_time_domain(g);

  // Parseval to 1e-9 relative
  CHECK(std::abs(t.total_power() - g.total_power()) / g.total_power() < 1e-12);

  // round trip to 1e-9 relative max error
  const Grid back = to_frequency_domain(t);
  const double scale = g.values.abs().maxCoeff();
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < g.n_plus(); ++i)
    for (Eigen::Index j = 0; j < g.n_minus(); ++j)
      max_err = std::max(max_err, std::abs(back.values(i, j) - g.values(i, j)));
  CHECK(max_err / scale < 1e-9);

  CHECK_THROWS_AS(to_time_domain(t), DomainError);
  CHECK_THROWS_AS(to_frequency_domain(g), DomainError);
}

TEST_CASE("gaussian transform pair: FWHM product per axis is 8 ln 2") {
  const double sp = 0.03, sm = 0.5;
  Grid g = make_gaussian_grid(256, 0.6, 8.0, sp, sm);
  const Grid t = to_time_domain(g);

  Curve freq_cut = modulus_cut_plus(g);
  Curve time_cut = modulus_cut_plus(t);
  const double wf = fwhm(freq_cut);
  const double wt = fwhm(time_cut);
  CHECK(wf * wt == doctest::Approx(8.0 * std::log(2.0)).epsilon(2e-3));
}

TEST_CASE("impulse transforms to flat modulus") {
  const Eigen::Index n = 64;
  Grid g;
  g.domain = GridDomain::Frequency;
  g.axis_plus = Axis<double>::centered(1.0, n);
  g.axis_minus = Axis<double>::centered(1.0, n);
  g.values = Grid::Values::Zero(n, n);
  g.values(5, 40) = 3.7;
  const Grid t = to_time_domain(g);
  const double expected = 3.7 * g.cell_area() / two_pi;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      CHECK(std::abs(t.values(i, j)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fwhm measurement") {
  // sampled Gaussian with FWHM 216 on a fine grid
  Curve g;
  const Eigen::Index n = 2001;
  g.x.resize(n);
  g.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = -600.0 + 1200.0 * double(i) / double(n - 1);
    g.x[i] = x;
    g.y[i] = std::exp(-4.0 * std::log(2.0) * x * x / (216.0 * 216.0));
  }
  CHECK(fwhm(g) == doctest::Approx(216.0).epsilon(0.01));

  // triangle peak with half-width w at half height has width exactly w
  Curve tri;
  tri.x.resize(201);
  tri.y.resize(201);
  const double w = 34.0;
  for (Eigen::Index i = 0; i < 201; ++i) {
    const double x = -100.0 + double(i);
    tri.x[i] = x;
    tri.y[i] = std::max(0.0, 1.0 - std::abs(x) / w);
  }
  CHECK(fwhm(tri) == doctest::Approx(w).epsilon(1e-12));

  // monotone curve has no measurable width
  Curve mono;
  mono.x.resize(50);
  mono.y.resize(50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    mono.x[i] = double(i);
    mono.y[i] = double(i) * 0.1;
  }
  CHECK_THROWS_AS(fwhm(mono), NotMeasurableError);
}
