#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "surfsc/errors.hpp"
#include "surfsc/layer.hpp"

using namespace surfsc;

namespace {

struct Fixture {
  OptimalProfile opt;
  LayerParams lp;
  Fixture() {
    AlphaSearch as;
    as.n_points = 512;
    opt = optimize_alpha(1.0, 0.05, 1.5, as);
    lp.k = 1.0;
    lp.eps = 0.05;
    lp.b = 1.5;
    // a pure phase is periodic on the boundary only for integer chi R / eps
    lp.delta_eps = std::ceil(opt.alpha_k / lp.eps) - opt.alpha_k / lp.eps;
  }
  double chi() const { return opt.alpha_k + lp.eps * lp.delta_eps; }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("delta_eps is the fractional part") {
  CHECK(delta_eps_for(1.0, 0.1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(delta_eps_for(1.0, 0.3) == doctest::Approx(5.0 / 0.9 - 5.0));
}

TEST_CASE("field file round trip") {
  const auto& fx = fixture();
  const auto fld = phase_field(fx.opt.profile, fx.lp, 32, fx.chi());
  const std::string path = "layer_roundtrip.bin";
  write_layer_field(fld, path);
  const auto back = read_layer_field(path, fx.lp.c0);
  std::remove(path.c_str());
  CHECK(back.n_s == fld.n_s);
  CHECK(back.n_t == fld.n_t);
  CHECK(back.params.delta_eps == fld.params.delta_eps);
  CHECK(back.psi == fld.psi);
  CHECK_THROWS_AS(read_layer_field("missing_field.bin"), Error);
}

TEST_CASE("pure phase state: total equals main term and reduced energy vanishes") {
  const auto& fx = fixture();
  const auto fld = phase_field(fx.opt.profile, fx.lp, 64, fx.chi());
  const auto sp = split_energy(fld, fx.opt);
  CHECK(std::abs(sp.mismatch) <= 1e-10 * std::abs(sp.total));
  CHECK(std::abs(sp.reduced) < 1e-10);
  const auto rf = compute_current_vorticity(fld, fx.opt);
  CHECK(rf.control_ok);
  for (double m : rf.vorticity) CHECK(std::abs(m) < 1e-10);
}

TEST_CASE("splitting identity for a perturbed field, disc and flat") {
  const auto& fx = fixture();
  auto fld = phase_field(fx.opt.profile, fx.lp, 64, fx.chi());
  const double L = fx.lp.length();
  for (int i = 0; i < fld.n_t; ++i)
    for (int j = 0; j < fld.n_s; ++j)
      fld.at(i, j) *= 1.0 + 0.1 * std::polar(std::exp(-0.1 * i * fld.ht()), 2.0 * std::numbers::pi * j * fld.hs() / L);
  const auto sp = split_energy(fld, fx.opt);
  CHECK(std::abs(sp.mismatch) <= 1e-10 * std::abs(sp.total));
  CHECK(eval_layer_energy(fld, Variant::disc) != eval_layer_energy(fld, Variant::flat));
  CHECK_THROWS_AS(split_energy(fld, fx.opt, Variant::flat), Error);
  AlphaSearch as;
  as.n_points = 512;
  const auto flat = optimize_alpha(0.0, fx.lp.eps, fx.lp.b, as);
  auto ff = phase_field(flat.profile, fx.lp, 64, 0.0);
  for (int i = 0; i < ff.n_t; ++i)
    for (int j = 0; j < ff.n_s; ++j) ff.at(i, j) = fld.at(i, j) / fx.opt.profile.f[i] * flat.profile.f[i];
  const auto spf = split_energy(ff, flat, Variant::flat);
  CHECK(std::abs(spf.mismatch) <= 1e-10 * std::abs(spf.total));
  const auto rt = reduced_terms(fld, fx.opt);
  CHECK(rt.chain_ok);
}

TEST_CASE("vorticity of a lattice vortex") {
  const int n = 40;
  std::vector<cplx> u(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx z(j - n / 2 + 0.5, i - n / 2 + 0.5);
      u[i * n + j] = z / std::abs(z);
    }
  const auto r = reduced_from_u(u, n, n, 0.1, 0.1);
  CHECK(r.control_ok);
  CHECK(box_vorticity(r, 5, 35, 5, 35) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-2));
  CHECK(std::abs(box_vorticity(r, 0, 10, 0, 10)) < 1e-2);
}

TEST_CASE("shape and division errors") {
  const auto& fx = fixture();
  CHECK_THROWS_AS(LayerField(fx.lp, 2, 64), Error);
  LayerField wrong(fx.lp, 16, 64);
  CHECK_THROWS_AS(split_energy(wrong, fx.opt), Error);
  CHECK_THROWS_AS(reduced_from_u(std::vector<cplx>(10), 4, 4, 0.1, 0.1), Error);
}
