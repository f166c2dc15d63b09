#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "surfsc/errors.hpp"
#include "surfsc/report.hpp"

using namespace surfsc;

TEST_CASE("exact scaling model") {
  std::vector<std::pair<double, double>> s;
  for (double e : {0.2, 0.1, 0.05, 0.02}) s.emplace_back(e, 3.0 * std::pow(e, 1.5));
  const auto f = fit_scaling(s, 0.0);
  CHECK(f.p_hat == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(f.C_hat == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("log factor is divided out") {
  std::vector<std::pair<double, double>> s;
  for (double e : {0.12, 0.08, 0.05}) s.emplace_back(e, 0.7 * e * std::abs(std::log(e)));
  const auto f = fit_scaling(s, 1.0, 1.0);
  CHECK(f.p_hat == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.envelope == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("noisy samples") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0.0, 0.05);
  std::vector<std::pair<double, double>> s;
  for (double e : {0.2, 0.1, 0.05, 0.025, 0.0125}) s.emplace_back(e, std::pow(e, 1.5) * (1.0 + N(rng)));
  CHECK(std::abs(fit_scaling(s, 0.0).p_hat - 1.5) < 0.15);
}

TEST_CASE("degenerate fits") {
  CHECK_THROWS_AS(fit_scaling({{0.1, 1.0}, {0.05, 0.5}}, 0.0), Error);
  CHECK_THROWS_AS(fit_scaling({{0.1, 1.0}, {0.05, 0.0}, {0.02, 0.1}}, 0.0), Error);
}

TEST_CASE("verdict json round trip") {
  Verdict v;
  v.id = "disc-energy";
  v.status = Status::report_only;
  v.constants = {{"C_fit", 0.25}, {"gap@0.05", 1e-3}};
  v.exponent = 1.02;
  v.exponent_target = 1.0;
  v.artifacts = {"disc_cells.csv"};
  v.message = "m";
  const nlohmann::json j = v;
  const auto back = j.get<Verdict>();
  CHECK(nlohmann::json(back).dump() == j.dump());
  Verdict w;
  w.id = "x";
  const nlohmann::json jw = w;
  CHECK(jw.at("exponent").is_null());
  CHECK(nlohmann::json(jw.get<Verdict>()).dump() == jw.dump());
  CHECK(status_from_string("report-only") == Status::report_only);
  CHECK_THROWS_AS(status_from_string("maybe"), Error);
}

TEST_CASE("sweep config json") {
  SweepConfig c;
  c.eps_list = {0.1, 0.07};
  c.only = {"theta0"};
  const nlohmann::json j = c;
  const auto back = j.get<SweepConfig>();
  CHECK(back.eps_list == c.eps_list);
  CHECK(back.only == c.only);
  const auto partial = nlohmann::json{{"b_list", {2.0}}}.get<SweepConfig>();
  CHECK(partial.b_list == std::vector<double>{2.0});
  CHECK(partial.eps_list == SweepConfig{}.eps_list);
  CHECK_THROWS_AS((nlohmann::json{{"eps_list", {1.5}}}.get<SweepConfig>()), Error);
}

TEST_CASE("c0 cap keeps the weight positive") {
  CHECK(capped_c0(4.0, 0.05, 1.0) == 4.0);
  const double c = capped_c0(4.0, 0.12, 1.0);
  CHECK(c < 4.0);
  CHECK(0.12 * c * std::abs(std::log(0.12)) < 1.0);
}

TEST_CASE("trivial-only sweep skips the disc checks and is deterministic") {
  SweepConfig c;
  c.b_list = {2.0};
  c.only = {"trivial-regime", "theta0", "disc-energy", "winding", "density-l2"};
  c.output_dir = "sweep_trivial";
  const auto r1 = run_sweep(c);
  std::ifstream in1(std::filesystem::path(c.output_dir) / "verdicts.json");
  std::stringstream s1;
  s1 << in1.rdbuf();
  const auto r2 = run_sweep(c);
  std::ifstream in2(std::filesystem::path(c.output_dir) / "verdicts.json");
  std::stringstream s2;
  s2 << in2.rdbuf();
  CHECK(s1.str() == s2.str());
  REQUIRE(r1.verdicts.size() == 5);
  for (const auto& v : r1.verdicts) {
    if (v.id == "trivial-regime" || v.id == "theta0")
      CHECK(v.status == Status::pass);
    else
      CHECK(v.status == Status::skipped);
  }
  CHECK(r1.all_pass());
  for (const auto& cell : r1.cells) CHECK_FALSE(cell.error.empty());
  std::filesystem::remove_all(c.output_dir);
}

TEST_CASE("per-cell failures are isolated") {
  SweepConfig c;
  c.disc_ds = -1.0;
  const auto r = run_disc_cell(0.12, 1.5, c);
  CHECK_FALSE(r.cell.error.empty());
}
