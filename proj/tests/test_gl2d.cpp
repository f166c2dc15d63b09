#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "surfsc/errors.hpp"
#include "surfsc/gl2d.hpp"

using namespace surfsc;

namespace {

constexpr double kEps = 0.12;

const OptimalProfile& profile() {
  static const OptimalProfile o = [] {
    AlphaSearch as;
    as.c0 = 3.0;
    as.n_points = 1024;
    return optimize_alpha(1.0, kEps, 1.5, as);
  }();
  return o;
}

DiscGrid small_grid() {
  DiscGridConfig c;
  c.eps = kEps;
  c.n_r = 20;
  c.n_theta = 160;
  return DiscGrid::make(c);
}

}  // namespace

TEST_CASE("grid geometry") {
  DiscGridConfig c;
  c.eps = kEps;
  const auto g = DiscGrid::make(c);
  CHECK(g.r.back() == doctest::Approx(1.0));
  CHECK(g.depth() == doctest::Approx(std::min(10.0, 0.75 / kEps)));
  double area = 0.0;
  for (int i = 0; i < g.n_r; ++i) area += g.area[i] * g.n_theta;
  const double annulus = std::numbers::pi * (1.0 - g.r.front() * g.r.front());
  CHECK(area == doctest::Approx(annulus).epsilon(1e-2));
  for (std::size_t i = 1; i < g.r.size(); ++i) CHECK(g.r[i] > g.r[i - 1]);
  const auto s = small_grid();
  CHECK(s.n_r == 20);
  CHECK(s.n_theta == 160);
}

TEST_CASE("psi gradient matches finite differences") {
  const auto g = small_grid();
  auto f = build_trial(profile(), g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (auto& z : f.psi) z *= cplx(1.0 + 0.05 * N(rng), 0.05 * N(rng));
  f.psi[g.idx(0, 0)] = 0.0;
  std::vector<cplx> gr;
  disc_gradient(f, gr);
  for (auto [i, j] : {std::pair{5, 7}, std::pair{19, 100}, std::pair{12, 159}}) {
    const auto k = g.idx(i, j);
    const double h = 1e-6;
    auto fp = f, fm = f;
    fp.psi[k] += h;
    fm.psi[k] -= h;
    const double dre = (disc_energy(fp) - disc_energy(fm)) / (2 * h);
    fp = f;
    fm = f;
    fp.psi[k] += cplx(0, h);
    fm.psi[k] -= cplx(0, h);
    const double dim = (disc_energy(fp) - disc_energy(fm)) / (2 * h);
    CHECK(gr[k].real() == doctest::Approx(dre).epsilon(1e-5));
    CHECK(gr[k].imag() == doctest::Approx(dim).epsilon(1e-5));
  }
}

TEST_CASE("energy is gauge invariant in coupled mode") {
  const auto g = small_grid();
  auto f = build_trial(profile(), g);
  f.mode = GaugeMode::coupled;
  const double e0 = disc_energy(f);
  std::vector<double> chi(g.nodes());
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j)
      chi[g.idx(i, j)] = 0.01 * std::sin(3.0 * j * g.dtheta) * g.r[i] + 0.002 * i;
  const double s = 1.0 / (kEps * kEps);
  auto h = f;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const auto k = g.idx(i, j);
      h.psi[k] *= std::polar(1.0, s * chi[k]);
      const int jn = (j + 1) % g.n_theta;
      h.a_th[k] -= chi[g.idx(i, jn)] - chi[k];
      if (i + 1 < g.n_r) h.a_r[k] -= chi[g.idx(i + 1, j)] - chi[k];
    }
  CHECK(disc_energy(h) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("fixed mode minimiser converges below the trial energy") {
  const auto g = small_grid();
  GLOptions o;
  const auto st = minimize_gl(profile(), g, o);
  const auto& r = st.result();
  CHECK(r.converged);
  CHECK(r.field.energy <= build_trial(profile(), g).energy);
  CHECK(r.field.residual <= o.tol);
  CHECK(std::abs(r.start_winding - trial_winding(1.0, kEps, profile().alpha_k)) <= 1);
  o.seed = 2;
  const auto st2 = minimize_gl(profile(), g, o);
  CHECK(st2.result().field.energy == doctest::Approx(r.field.energy).epsilon(1e-7));
}

TEST_CASE("coupled mode on a small grid") {
  const auto g = small_grid();
  GLOptions o;
  o.mode = GaugeMode::coupled;
  const auto r = minimize_gl_from(build_trial(profile(), g), o);
  CHECK(r.converged);
  GLOptions fx;
  const auto fixed = minimize_gl_from(build_trial(profile(), g), fx);
  CHECK(r.field.energy <= fixed.field.energy + 1e-10);
  CHECK(std::abs(gamma0(r.field) - 0.5) < 0.05);
}

TEST_CASE("radial reduction, density and winding diagnostics") {
  const auto g = small_grid();
  const auto red = radial_reduction(g, 1.5, profile());
  CHECK(red.f.front() == 0.0);
  const auto st = minimize_gl(profile(), g, GLOptions{});
  const auto& f = st.result().field;
  const auto sym = radial_state(g, 1.5, static_cast<double>(st.result().start_winding));
  CHECK(red.energy <= sym.energy + 1e-12);
  CHECK(f.energy <= sym.energy + 1e-9 * std::abs(sym.energy));
  const auto d = density_checks(f, red.f, GammaRule{});
  CHECK(d.l2_err < 0.05);
  CHECK(d.linf_layer_err < 0.1);
  CHECK(d.layer_nodes > 0);
  const auto w = winding_number(f, 1.0, profile().alpha_k, 0.01);
  CHECK(w.degree == -st.result().start_winding);
  CHECK(w.degree == winding_number(f, 1.0 - kEps / 2.0, profile().alpha_k, 0.01).degree);
  CHECK_THROWS_AS(winding_number(f, g.r.front(), profile().alpha_k, 0.01), Error);
}

TEST_CASE("gamma rule admissibility") {
  CHECK(GammaRule{}.admissible());
  CHECK(GammaRule{}.value(0.05) == doctest::Approx(std::pow(std::log(20.0), -2)));
  CHECK_FALSE(GammaRule{1.0, 0.5, 0.0}.admissible());
  CHECK_FALSE(GammaRule{1.0, 1.0 / 6.0, 1.0}.admissible());
  CHECK(GammaRule{1.0, 1.0 / 6.0, 2.0}.admissible());
}

TEST_CASE("trivial regime is rejected") {
  const auto g = small_grid();
  DiscField f(g, 2.0);
  CHECK_THROWS_AS(minimize_gl_from(f, GLOptions{}), Error);
}
