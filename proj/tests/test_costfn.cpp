#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "surfsc/costfn.hpp"
#include "surfsc/errors.hpp"

using namespace surfsc;

TEST_CASE("potential F vanishes at both ends and is non-positive") {
  const auto o = optimize_alpha(0.0, 0.0, 1.5);
  const auto F = potential_F(o);
  const double scale = std::abs(*std::min_element(F.begin(), F.end()));
  CHECK(std::abs(F.front()) < 1e-12 * scale + 1e-15);
  CHECK(std::abs(F.back()) < 1e-9 * scale);
  for (double x : F) CHECK(x <= 1e-9 * scale);
}

TEST_CASE("F0 closed form agrees after Richardson extrapolation") {
  const auto o = optimize_alpha(0.0, 0.0, 1.5);
  const double raw = F0_closed_form_check(o);
  const double rich = F0_closed_form_richardson(1.5);
  CHECK(rich < 1e-8);
  CHECK(rich < raw);
}

TEST_CASE("K0 is non-negative in the surface regime") {
  for (double b : {1.2, 1.5}) {
    const auto c = cost_K0(optimize_alpha(0.0, 0.0, b));
    CHECK(c.min_K_global >= -1e-8);
    CHECK(c.certified);
  }
}

TEST_CASE("Kk without the d correction is non-negative on the certified region") {
  const auto o = optimize_alpha(1.0, 0.05, 1.5);
  const auto c = cost_Kk(o, 0.0);
  CHECK(c.min_K_certified >= -1e-8);
  CHECK(c.t_bar > 0.0);
  CHECK(c.beta_eps >= 0.0);
}

TEST_CASE("d_eps default") {
  CHECK(d_eps_auto(0.1) == doctest::Approx(0.5 / std::pow(std::log(10.0), 4)));
}

TEST_CASE("preconditions") {
  const auto o = optimize_alpha(1.0, 0.05, 1.5);
  CHECK_THROWS_AS(cost_K0(o), Error);
  CHECK_THROWS_AS(cost_Kk(o, -0.1), Error);
  auto off = o;
  off.profile.params.alpha += 0.05;
  off.profile = minimize_profile(off.profile.params);
  off.fh_residual = fh_integral(off.profile);
  CHECK_THROWS_AS(potential_F(off), Error);
}
