#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "surfsc/report.hpp"

using namespace surfsc;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Line()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Line l;
  try {
    l = fn();
  } catch (const std::exception& e) {
    l = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget_s;
  const bool ok = l.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s  %2d %-28s %8.2fs (budget %.0fs)  %s%s\n", ok ? "PASS" : "FAIL", id, name, dt, budget_s,
              l.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double c(const Verdict& v, const std::string& k) {
  const auto it = v.constants.find(k);
  return it == v.constants.end() ? std::nan("") : it->second;
}

Line from(const Verdict& v, std::string detail) {
  if (!v.message.empty() && v.status == Status::fail) detail += " | " + v.message;
  return {v.status == Status::pass, detail};
}

}  // namespace

int main() {
  run(1, "de Gennes constant", 1.0, [] {
    const auto v = check_theta0();
    return from(v, "1/Theta0 = " + fmt("%.7f", c(v, "inv_theta0")) + ", grid-halving change " +
                       fmt("%.1e", c(v, "half_h_change")));
  });
  run(2, "oscillator anchor", 1.0, [] {
    const auto v = check_oscillator_anchor();
    return from(v, "|mu_osc(0) - 1| = " + fmt("%.1e", c(v, "mu_osc_0_dev")) + ", |alpha0 + sqrt Theta0| = " +
                       fmt("%.1e", c(v, "alpha0_plus_sqrt_theta0")));
  });
  run(3, "trivial regime", 5.0, [] {
    const auto v = check_trivial_regime(10);
    return from(v, fmt("%.0f", c(v, "trivial")) + "/10 triples with f = 0, E = 0");
  });
  run(4, "oracle equivalence", 30.0, [] {
    double df = 0.0, de = 0.0;
    std::uint64_t seed = 1;
    for (double k : {0.0, 1.0})
      for (double b : {1.2, 1.5}) {
        AlphaSearch as;
        as.n_points = 4096;
        const auto o = optimize_alpha(k, 0.05, b, as);
        const auto fn = profile_functional(o.profile.params);
        const auto r = oracle::projected_bb_restarts(fn, o.profile.t, seed++, 1e-8, 20000);
        for (std::size_t i = 0; i < r.f.size(); ++i) df = std::max(df, std::abs(r.f[i] - o.profile.f[i]));
        de = std::max(de, std::abs(r.energy - o.profile.energy));
      }
    return Line{df <= 1e-6 && de <= 1e-8, "max |df| = " + fmt("%.1e", df) + ", max |dE| = " + fmt("%.1e", de) +
                                              " (n = 4096, 3 restarts)"};
  });
  run(5, "identity suite", 60.0, [] {
    const auto v = check_identity_suite(20, 1);
    return from(v, "worst rel: energy " + fmt("%.1e", c(v, "energy_identity_rel")) + ", FH " +
                       fmt("%.1e", c(v, "fh_residual_rel")) + ", F ends " + fmt("%.1e", c(v, "F_endpoint_rel")) +
                       ", F0 " + fmt("%.1e", c(v, "F0_closed_form_rel")) + ", split " +
                       fmt("%.1e", c(v, "splitting_rel")));
  });
  run(6, "cost-function certificates", 60.0, [] {
    const auto k0 = check_k0_positivity({1.0, 1.2, 1.4, 1.6, 1.69}, 4095);
    const auto kk = check_kk_positivity({1.2, 1.5}, {0.1, 0.05});
    double m0 = 1e300;
    for (const auto& [key, x] : k0.constants)
      if (key.rfind("min_K0@", 0) == 0 && key.find("report") == std::string::npos) m0 = std::min(m0, x);
    std::string d = "min K0 = " + fmt("%.1e", m0) + "; K0 " + to_string(k0.status) + ", Kk " + to_string(kk.status);
    if (kk.status == Status::fail) d += " | " + kk.message;
    return Line{k0.status == Status::pass && kk.status == Status::pass, d};
  });

  SweepConfig cfg;
  std::vector<DiscCellResult> cells;
  std::vector<DiscCell> table;
  run(7, "disc energy expansion", 1800.0, [&] {
    for (double eps : cfg.eps_list) {
      cells.push_back(run_disc_cell(eps, 1.5, cfg));
      table.push_back(cells.back().cell);
    }
    const auto v = check_disc_energy(table);
    std::string d;
    for (const auto& cell : table)
      d += "eps " + fmt("%.2f", cell.eps) + ": gap " + fmt("%.2e", cell.gap_matched) + "; ";
    d += "exponent " + fmt("%.2f", v.exponent.value_or(std::nan(""))) + ", C " + fmt("%.3f", c(v, "C_envelope"));
    return from(v, d);
  });
  run(8, "density estimates", 1.0, [&] {
    const auto l2 = check_density_l2(table);
    const auto li = check_pan_linf(table, 0.05);
    const auto bd = check_pan_boundary(table);
    return Line{l2.status == Status::pass && li.status == Status::pass,
                "L2 exponent " + fmt("%.2f", l2.exponent.value_or(std::nan(""))) + " (>= 1.4), layer sup " +
                    fmt("%.4f", c(li, "linf_layer_err")) + " (< 0.1), boundary exponent " +
                    fmt("%.2f", bd.exponent.value_or(std::nan(""))) + " [" + to_string(bd.status) + "]"};
  });
  run(9, "winding number", 1.0, [&] {
    const auto v = check_winding(table, 0.08);
    return from(v, "deg " + fmt("%.0f", c(v, "degree")) + " (inner " + fmt("%.0f", c(v, "degree_inner_contour")) +
                       "), gap " + fmt("%.1f", c(v, "gap")) + " <= " + fmt("%.1f", c(v, "bound")) +
                       " against R^2/(2eps^2)+|alpha|/eps; literal pi R^2/eps^2 form gap " +
                       fmt("%.1f", c(v, "gap_literal")));
  });
  run(10, "current/vorticity control", 60.0, [&] {
    std::vector<const LayerField*> f;
    std::vector<const OptimalProfile*> p;
    for (const auto& r : cells)
      if (r.cell.error.empty()) {
        f.push_back(&r.layer);
        p.push_back(&r.profile);
      }
    const auto v = check_vorticity(f, p, 40);
    return from(v, fmt("%.0f", c(v, "synthetic_ok")) + "/10 synthetic, " + fmt("%.0f", c(v, "extracted_ok")) + "/" +
                       fmt("%.0f", c(v, "extracted_fields")) + " extracted, vortex circulation err " +
                       fmt("%.1e", c(v, "vortex_circulation_rel_err")) + ", box flux err " +
                       fmt("%.1e", c(v, "vortex_flux_rel_err")));
  });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
