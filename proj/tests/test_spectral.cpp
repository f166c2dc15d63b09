#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "surfsc/errors.hpp"
#include "surfsc/spectral.hpp"

using namespace surfsc;

TEST_CASE("uniform grid and interval length") {
  const auto g = uniform_grid(6.0, 61);
  CHECK(g.t.front() == 0.0);
  CHECK(g.t.back() == doctest::Approx(6.0));
  CHECK(g.h == doctest::Approx(0.1));
  CHECK(interval_length(0.0, 4.0, 12.0) == 12.0);
  CHECK(interval_length(0.1, 4.0) == doctest::Approx(4.0 * std::log(10.0)));
  CHECK_THROWS_AS(uniform_grid(6.0, 8), Error);
  CHECK_THROWS_AS(interval_length(1.5, 4.0), Error);
}

TEST_CASE("curved potential reduces to the flat one") {
  for (double t : {0.0, 0.5, 3.0})
    CHECK(curved_potential(1.0, -0.7, 0.0, t) == doctest::Approx((t - 0.7) * (t - 0.7)));
  CHECK(curved_weight(1.0, 0.1, 2.0) == doctest::Approx(0.8));
  CHECK_THROWS_AS(curved_functional(1.0, -0.7, 0.0, 1.5, uniform_grid(12.0, 64)), Error);
}

TEST_CASE("oscillator ground state at alpha = 0") {
  OscillatorSpec s;
  const auto r = mu_osc(s);
  CHECK(std::abs(r.mu - 1.0) < 1e-6);
  CHECK(r.residual < 1e-10);
  double norm = 0.0;
  const auto fn = curved_functional(0.0, 0.0, 0.0, 1.5, uniform_grid(s.truncation_T, s.n_points));
  for (int i = 0; i < fn.size(); ++i) norm += fn.mass[i] * r.phi[i] * r.phi[i];
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("deep well tends to the full-line ground state") {
  OscillatorSpec s;
  s.alpha = -5.0;
  CHECK(std::abs(mu_osc(s).mu - 1.0) < 1e-5);
}

TEST_CASE("sturm plus inverse iteration agrees with a dense solver") {
  for (double k : {0.0, 1.0}) {
    const double eps = k == 0.0 ? 0.0 : 0.1;
    const auto grid = uniform_grid(k == 0.0 ? 12.0 : interval_length(eps, 4.0), 401);
    const auto fn = curved_functional(k, -0.7, eps, 1.5, grid);
    const auto r = ground_state(fn, grid.t);
    CHECK(r.mu == doctest::Approx(oracle::dense_lowest(fn)).epsilon(1e-11));
  }
}

TEST_CASE("de Gennes constant and its minimiser") {
  const auto r = find_theta0();
  CHECK(std::abs(1.0 / r.theta0 - 1.6946) <= 1e-3);
  CHECK(std::abs(r.alpha0 + std::sqrt(r.theta0)) <= 1e-5);
  OscillatorSpec s;
  s.alpha = r.alpha0;
  CHECK(mu_osc(s).mu == doctest::Approx(r.theta0).epsilon(1e-12));
}

TEST_CASE("Feynman-Hellmann derivative matches finite differences") {
  CurvedOperatorSpec s;
  s.k = 1.0;
  s.eps = 0.08;
  s.alpha = -0.6;
  const auto r = mu_eps(s);
  const auto fn = curved_functional(s.k, s.alpha, s.eps, 1.5, uniform_grid(interval_length(s.eps, s.c0), s.n_points));
  const double d = fh_derivative(r, s.k, s.alpha, s.eps, fn.mass);
  const double h = 1e-5;
  auto sp = s, sm = s;
  sp.alpha += h;
  sm.alpha -= h;
  CHECK(d == doctest::Approx((mu_eps(sp).mu - mu_eps(sm).mu) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("curved eigenvalue approaches the flat one") {
  CurvedOperatorSpec s;
  s.k = 1.0;
  s.alpha = -0.77;
  double prev = 1e300;
  for (double eps : {0.1, 0.05, 0.025}) {
    s.eps = eps;
    const double c = osc_deviation_constant(s);
    CHECK(std::isfinite(c));
    OscillatorSpec o;
    o.alpha = s.alpha;
    const double dev = std::abs(mu_eps(s).mu - mu_osc(o).mu);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("alpha window") {
  const auto w = alpha_window(1.5, 0.0, 0.05);
  REQUIRE_FALSE(w.empty);
  CHECK(w.lo < -0.768);
  CHECK(w.hi > -0.768);
  CHECK(alpha_window(2.0, 0.0, 0.05).empty);
  CHECK_THROWS_AS(alpha_window(-1.0, 0.0, 0.05), Error);
}
