#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "surfsc/errors.hpp"
#include "surfsc/profile1d.hpp"

using namespace surfsc;

namespace {

ProfileParams params(double k, double alpha, double eps, double b, int n = 1024) {
  ProfileParams p;
  p.k = k;
  p.alpha = alpha;
  p.eps = eps;
  p.b = b;
  p.n_points = n;
  return p;
}

}  // namespace

TEST_CASE("trivial regime gives the zero profile") {
  for (double k : {0.0, 1.0}) {
    const auto p = minimize_profile(params(k, -0.77, k == 0.0 ? 0.0 : 0.05, 2.0));
    CHECK(p.trivial);
    CHECK(p.energy == 0.0);
    for (double x : p.f) CHECK(x == 0.0);
  }
}

TEST_CASE("non-trivial profile is positive, decreasing in the tail, and a critical point") {
  const auto p = minimize_profile(params(1.0, -0.77, 0.05, 1.5));
  REQUIRE_FALSE(p.trivial);
  CHECK(p.energy < 0.0);
  for (double x : p.f) CHECK(x >= 0.0);
  CHECK(ode_residual(p) < 1e-9);
  const auto id = energy_identity(p);
  CHECK(id.lhs == doctest::Approx(id.rhs).epsilon(1e-10));
  CHECK(p.f.front() < 1.0);
}

TEST_CASE("newton minimiser agrees with the projected gradient oracle") {
  const auto p = params(1.0, -0.7, 0.1, 1.3, 800);
  const auto mine = minimize_profile(p);
  const auto orc = oracle::projected_bb_restarts(profile_functional(p), mine.t, 3, 1e-9, 20000);
  double df = 0.0;
  for (std::size_t i = 0; i < mine.f.size(); ++i) df = std::max(df, std::abs(mine.f[i] - orc.f[i]));
  CHECK(df < 1e-6);
  CHECK(std::abs(mine.energy - orc.energy) < 1e-8);
}

TEST_CASE("optimal phase satisfies the Feynman-Hellmann condition") {
  const auto o = optimize_alpha(0.0, 0.0, 1.5);
  REQUIRE_FALSE(o.trivial);
  CHECK(std::abs(o.fh_residual) < 1e-9);
  CHECK(o.alpha_k < 0.0);
  for (double da : {-0.05, 0.05}) {
    auto q = o.profile.params;
    q.alpha = o.alpha_k + da;
    CHECK(minimize_profile(q).energy > o.profile.energy);
  }
}

TEST_CASE("curvature lowers the optimal energy at first order") {
  AlphaSearch as;
  as.n_points = 1024;
  const auto flat = optimize_alpha(0.0, 0.05, 1.5, as);
  const auto disc = optimize_alpha(1.0, 0.05, 1.5, as);
  CHECK(disc.profile.energy < flat.profile.energy);
}

TEST_CASE("pointwise and gradient bounds") {
  const auto o = optimize_alpha(1.0, 0.05, 1.5);
  CHECK(pointwise_bounds_check(o.profile).ok);
  CHECK(gradient_bound_check(o.profile).ok);
}

TEST_CASE("regime guard and domain errors") {
  CHECK_THROWS_AS(optimize_alpha(0.0, 0.0, 2.0), Error);
  CHECK_THROWS_AS(minimize_profile(params(1.0, -0.7, 0.0, 1.5)), Error);
  CHECK_THROWS_AS(minimize_profile(params(-1.0, -0.7, 0.05, 1.5)), Error);
  CHECK(eps_from_kappa(10.0, 1.5) == doctest::Approx(1.0 / (std::sqrt(1.5) * 10.0)));
}
