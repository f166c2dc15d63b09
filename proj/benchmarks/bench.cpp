#include <benchmark/benchmark.h>

#include "surfsc/costfn.hpp"
#include "surfsc/gl2d.hpp"
#include "surfsc/layer.hpp"
#include "surfsc/report.hpp"

using namespace surfsc;

static void BM_FindTheta0(benchmark::State& st) {
  Theta0Config c;
  c.n_points = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(find_theta0(c).theta0);
}
BENCHMARK(BM_FindTheta0)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);

static void BM_MinimizeProfile(benchmark::State& st) {
  ProfileParams p;
  p.k = 1.0;
  p.eps = 0.05;
  p.alpha = -0.78;
  p.n_points = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(minimize_profile(p).energy);
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_MinimizeProfile)->RangeMultiplier(2)->Range(512, 8192)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_OptimizeAlpha(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(optimize_alpha(1.0, 0.05, 1.5).alpha_k);
}
BENCHMARK(BM_OptimizeAlpha)->Unit(benchmark::kMillisecond);

static void BM_CostKk(benchmark::State& st) {
  const auto o = optimize_alpha(1.0, 0.05, 1.5);
  CostOptions co;
  co.report_only = true;
  for (auto _ : st) benchmark::DoNotOptimize(cost_Kk(o, d_eps_auto(0.05), co).min_K_certified);
}
BENCHMARK(BM_CostKk)->Unit(benchmark::kMillisecond);

static void BM_SplitEnergy(benchmark::State& st) {
  const auto o = optimize_alpha(1.0, 0.05, 1.5);
  LayerParams lp;
  lp.eps = 0.05;
  lp.delta_eps = delta_eps_for(1.0, 0.05);
  const auto fld = phase_field(o.profile, lp, static_cast<int>(st.range(0)), o.alpha_k + lp.eps * lp.delta_eps);
  for (auto _ : st) benchmark::DoNotOptimize(split_energy(fld, o).mismatch);
}
BENCHMARK(BM_SplitEnergy)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_DiscEnergyGradient(benchmark::State& st) {
  AlphaSearch as;
  as.c0 = 3.0;
  const auto o = optimize_alpha(1.0, 0.08, 1.5, as);
  DiscGridConfig c;
  c.eps = 0.08;
  const auto f = build_trial(o, DiscGrid::make(c));
  std::vector<cplx> g;
  for (auto _ : st) benchmark::DoNotOptimize(disc_gradient(f, g));
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * f.grid.nodes()));
}
BENCHMARK(BM_DiscEnergyGradient)->Unit(benchmark::kMillisecond);

static void BM_DiscMinimizeFixed(benchmark::State& st) {
  AlphaSearch as;
  as.c0 = capped_c0(4.0, 0.12, 1.0);
  const auto o = optimize_alpha(1.0, 0.12, 1.5, as);
  DiscGridConfig c;
  c.eps = 0.12;
  const auto grid = DiscGrid::make(c);
  for (auto _ : st) benchmark::DoNotOptimize(minimize_gl(o, grid, GLOptions{}).result().field.energy);
}
BENCHMARK(BM_DiscMinimizeFixed)->Unit(benchmark::kMillisecond)->Iterations(3);
BENCHMARK_MAIN();
