#include "surfsc/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "surfsc/costfn.hpp"
#include "surfsc/errors.hpp"
#include "surfsc/spectral.hpp"

namespace surfsc {

namespace {

constexpr double kPi = std::numbers::pi;

double log_abs(double eps) { return std::abs(std::log(eps)); }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string key(const std::string& name, double x) { return name + "@" + num(x); }

bool enabled(const SweepConfig& c, const std::string& id) {
  return c.only.empty() || std::find(c.only.begin(), c.only.end(), id) != c.only.end();
}

Verdict failed(const std::string& id, const std::exception& e) {
  Verdict v;
  v.id = id;
  v.status = Status::fail;
  v.message = e.what();
  return v;
}

template <class F>
Verdict guarded(const std::string& id, F&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return failed(id, e);
  }
}

// Smooth random s-periodic field times the profile.
LayerField random_layer_field(const OptimalProfile& opt, const LayerParams& lp, int n_s,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  LayerField fld(lp, n_s, static_cast<int>(opt.profile.f.size()));
  const double L = lp.length();
  struct Mode {
    int m;
    cplx a;
    double t0;
  };
  std::vector<Mode> modes;
  for (int m = -2; m <= 2; ++m) modes.push_back({m, cplx(0.2 * N(rng), 0.2 * N(rng)), 3.0 * std::abs(N(rng))});
  for (int i = 0; i < fld.n_t; ++i) {
    const double t = opt.profile.t[i];
    for (int j = 0; j < n_s; ++j) {
      const double s = j * fld.hs();
      cplx v = 1.0;
      for (const auto& md : modes)
        v += md.a * std::exp(-(t - md.t0) * (t - md.t0)) * std::polar(1.0, 2.0 * kPi * md.m * s / L);
      fld.at(i, j) = opt.profile.f[i] * v;
    }
  }
  return fld;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& cols) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n' << std::setprecision(17);
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c][r];
    out << '\n';
  }
}

std::vector<const DiscCell*> usable(const std::vector<DiscCell>& cells) {
  std::vector<const DiscCell*> out;
  for (const auto& c : cells)
    if (c.error.empty()) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](const DiscCell* a, const DiscCell* b) { return a->eps > b->eps; });
  return out;
}

Verdict skipped(const std::string& id, const std::string& why) {
  Verdict v;
  v.id = id;
  v.status = Status::skipped;
  v.message = why;
  return v;
}

}  // namespace

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples, double q,
                       std::optional<double> p_target) {
  if (samples.size() < 3) throw Error(ErrorKind::fit, "scaling fit needs at least 3 samples");
  std::vector<double> x, y;
  for (const auto& [eps, v] : samples) {
    if (!(eps > 0.0 && eps < 1.0) || !(v > 0.0))
      throw Error(ErrorKind::fit, "scaling fit needs 0 < eps < 1 and positive values");
    x.push_back(std::log(eps));
    y.push_back(std::log(v) - q * std::log(log_abs(eps)));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k] / n, my += y[k] / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::fit, "scaling fit needs distinct eps values");
  ScalingFit f;
  f.p_hat = sxy / sxx;
  const double c = my - f.p_hat * mx;
  f.C_hat = std::exp(c);
  double rr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - c - f.p_hat * x[k];
    rr += e * e;
  }
  f.residual = std::sqrt(rr / n);
  const double p = p_target.value_or(f.p_hat);
  for (const auto& [eps, v] : samples)
    f.envelope = std::max(f.envelope, v / (std::pow(eps, p) * std::pow(log_abs(eps), q)));
  return f;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::report_only: return "report-only";
    case Status::skipped: return "skipped";
  }
  return "fail";
}

Status status_from_string(const std::string& s) {
  if (s == "pass") return Status::pass;
  if (s == "fail") return Status::fail;
  if (s == "report-only") return Status::report_only;
  if (s == "skipped") return Status::skipped;
  throw Error(ErrorKind::io, "unknown verdict status " + s);
}

void to_json(nlohmann::json& j, const Verdict& v) {
  j = nlohmann::json{{"id", v.id},
                     {"status", to_string(v.status)},
                     {"constants", v.constants},
                     {"artifacts", v.artifacts},
                     {"message", v.message}};
  j["exponent"] = v.exponent ? nlohmann::json(*v.exponent) : nlohmann::json(nullptr);
  j["exponent_target"] = v.exponent_target ? nlohmann::json(*v.exponent_target) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Verdict& v) {
  v.id = j.at("id").get<std::string>();
  v.status = status_from_string(j.at("status").get<std::string>());
  v.constants = j.at("constants").get<std::map<std::string, double>>();
  v.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  v.message = j.at("message").get<std::string>();
  v.exponent = j.at("exponent").is_null() ? std::nullopt : std::optional<double>(j.at("exponent").get<double>());
  v.exponent_target = j.at("exponent_target").is_null()
                          ? std::nullopt
                          : std::optional<double>(j.at("exponent_target").get<double>());
}

void to_json(nlohmann::json& j, const SweepConfig& c) {
  j = nlohmann::json{{"eps_list", c.eps_list},
                     {"b_list", c.b_list},
                     {"R", c.R},
                     {"c0", c.c0},
                     {"n_points", c.n_points},
                     {"disc_dt0", c.disc_dt0},
                     {"disc_growth", c.disc_growth},
                     {"disc_depth", c.disc_depth},
                     {"disc_ds", c.disc_ds},
                     {"k0_b_list", c.k0_b_list},
                     {"k0_n_points", c.k0_n_points},
                     {"kk_b_list", c.kk_b_list},
                     {"kk_eps_list", c.kk_eps_list},
                     {"identity_samples", c.identity_samples},
                     {"trivial_samples", c.trivial_samples},
                     {"pan_eps", c.pan_eps},
                     {"winding_eps", c.winding_eps},
                     {"vorticity_box_cells", c.vorticity_box_cells},
                     {"seed", c.seed},
                     {"output_dir", c.output_dir},
                     {"only", c.only}};
}

void from_json(const nlohmann::json& j, SweepConfig& c) {
  SweepConfig d;
  auto get = [&](const char* name, auto& field) {
    if (j.contains(name)) j.at(name).get_to(field);
  };
  c = d;
  get("eps_list", c.eps_list);
  get("b_list", c.b_list);
  get("R", c.R);
  get("c0", c.c0);
  get("n_points", c.n_points);
  get("disc_dt0", c.disc_dt0);
  get("disc_growth", c.disc_growth);
  get("disc_depth", c.disc_depth);
  get("disc_ds", c.disc_ds);
  get("k0_b_list", c.k0_b_list);
  get("k0_n_points", c.k0_n_points);
  get("kk_b_list", c.kk_b_list);
  get("kk_eps_list", c.kk_eps_list);
  get("identity_samples", c.identity_samples);
  get("trivial_samples", c.trivial_samples);
  get("pan_eps", c.pan_eps);
  get("winding_eps", c.winding_eps);
  get("vorticity_box_cells", c.vorticity_box_cells);
  get("seed", c.seed);
  get("output_dir", c.output_dir);
  get("only", c.only);
  for (double e : c.eps_list)
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorKind::domain, "sweep eps must lie in (0, 1)");
  if (!(c.R > 0.0)) throw Error(ErrorKind::domain, "sweep R must be positive");
}

double capped_c0(double c0, double eps, double k) {
  if (k <= 0.0 || eps <= 0.0) return c0;
  return std::min(c0, 0.9 / (eps * k * log_abs(eps)));
}

Verdict check_theta0() {
  return guarded("theta0", [] {
    Verdict v;
    v.id = "theta0";
    const auto r = find_theta0();
    Theta0Config fine;
    fine.n_points = 2 * (fine.n_points - 1) + 1;
    const auto r2 = find_theta0(fine);
    const double change = std::abs(r2.theta0 - r.theta0);
    const double dev = std::abs(1.0 / r.theta0 - 1.6946);
    v.constants = {{"theta0", r.theta0}, {"inv_theta0", 1.0 / r.theta0}, {"alpha0", r.alpha0},
                   {"half_h_change", change}, {"inv_theta0_dev", dev}};
    v.status = dev <= 1e-3 && change < 1e-6 ? Status::pass : Status::fail;
    v.message = "1/theta0 within 1e-3 of 1.6946 and stable under grid halving";
    return v;
  });
}

Verdict check_oscillator_anchor() {
  return guarded("oscillator-anchor", [] {
    Verdict v;
    v.id = "oscillator-anchor";
    OscillatorSpec s;
    s.alpha = 0.0;
    const double mu0 = mu_osc(s).mu;
    const auto r = find_theta0();
    const double id = std::abs(r.alpha0 + std::sqrt(r.theta0));
    v.constants = {{"mu_osc_0", mu0}, {"mu_osc_0_dev", std::abs(mu0 - 1.0)}, {"alpha0", r.alpha0},
                   {"alpha0_plus_sqrt_theta0", id}};
    v.status = std::abs(mu0 - 1.0) <= 1e-6 && id <= 1e-5 ? Status::pass : Status::fail;
    v.message = "mu_osc(0) = 1 and alpha0 = -sqrt(theta0)";
    return v;
  });
}

Verdict check_trivial_regime(int samples) {
  return guarded("trivial-regime", [samples] {
    Verdict v;
    v.id = "trivial-regime";
    const std::vector<std::array<double, 3>> base = {
        {0, -1.2, 0}, {0, -0.77, 0}, {0, -0.3, 0}, {0, 0.4, 0}, {0, -0.77, 0.05},
        {1, -0.9, 0.05}, {1, -0.77, 0.05}, {1, -0.5, 0.1}, {1, 0.2, 0.08}, {1, -1.3, 0.05}};
    int ok = 0, total = 0;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const auto& t = base[s % base.size()];
      ProfileParams p;
      p.k = t[0];
      p.alpha = t[1] - 0.01 * (s / static_cast<int>(base.size()));
      p.eps = t[2];
      p.b = 2.0;
      const auto prof = minimize_profile(p);
      double m = 0.0;
      for (double x : prof.f) m = std::max(m, std::abs(x));
      worst = std::max({worst, m, std::abs(prof.energy)});
      ++total;
      if (prof.trivial && m == 0.0 && prof.energy == 0.0) ++ok;
    }
    v.constants = {{"samples", static_cast<double>(total)}, {"trivial", static_cast<double>(ok)},
                   {"max_abs_f_or_E", worst}};
    v.status = ok == total ? Status::pass : Status::fail;
    v.message = "b = 2: every sampled (k, alpha, eps) gives f = 0 and E = 0";
    return v;
  });
}

Verdict check_identity_suite(int samples, std::uint64_t seed) {
  return guarded("identity-suite", [samples, seed] {
    Verdict v;
    v.id = "identity-suite";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ub(1.1, 1.65), ue(0.04, 0.1);
    double e_id = 0.0, fh = 0.0, f_end = 0.0, f0 = 0.0, split = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double b = ub(rng);
      const bool disc = s % 2 == 1;
      const double eps = disc ? ue(rng) : 0.0;
      const double k = disc ? 1.0 : 0.0;
      const auto opt = optimize_alpha(k, eps, b);
      const auto idp = energy_identity(opt.profile);
      e_id = std::max(e_id, std::abs(idp.lhs - idp.rhs) / std::max(1e-300, std::abs(idp.lhs)));
      fh = std::max(fh, std::abs(opt.fh_residual) / std::max(1e-300, std::abs(opt.profile.energy)));
      const auto F = potential_F(opt);
      double fmax = 0.0;
      for (double x : F) fmax = std::max(fmax, std::abs(x));
      f_end = std::max(f_end, std::max(std::abs(F.front()), std::abs(F.back())) / fmax);
      if (!disc) {
        f0 = std::max(f0, F0_closed_form_richardson(b) / fmax);
      } else {
        LayerParams lp;
        lp.k = k;
        lp.eps = eps;
        lp.b = b;
        lp.delta_eps = delta_eps_for(1.0, eps);
        const auto fld = random_layer_field(opt, lp, 64, rng);
        const auto sp = split_energy(fld, opt);
        split = std::max(split, std::abs(sp.mismatch) / std::abs(sp.total));
      }
    }
    v.constants = {{"energy_identity_rel", e_id}, {"fh_residual_rel", fh}, {"F_endpoint_rel", f_end},
                   {"F0_closed_form_rel", f0}, {"splitting_rel", split},
                   {"samples", static_cast<double>(samples)}};
    const double worst = std::max({e_id, fh, f_end, f0, split});
    v.status = worst <= 1e-8 ? Status::pass : Status::fail;
    v.message = "energy identity, FH residual, F endpoints, F0 closed form (Richardson), splitting";
    return v;
  });
}

Verdict check_k0_positivity(const std::vector<double>& b_list, int n_points) {
  return guarded("K0-positivity", [&] {
    Verdict v;
    v.id = "K0-positivity";
    bool ok = true;
    std::string bad;
    AlphaSearch as;
    as.n_points = n_points;
    as.regime_guard = false;
    CostOptions co;
    co.report_only = true;
    for (double b : b_list) {
      const auto opt = optimize_alpha(0.0, 0.0, b, as);
      const auto c = cost_K0(opt, co);
      v.constants[key("min_K0", b)] = c.min_K_global;
      v.constants[key("K0_end", b)] = c.K.back();
      v.constants[key("critical_identity_err", b)] = c.critical_identity_err;
      if (c.min_K_global < -1e-8 || std::abs(c.K.back()) > 1e-8) {
        ok = false;
        bad += " b=" + num(b) + " min K0 " + num(c.min_K_global) + " at t=" + num(c.argmin_K);
      }
    }
    AlphaSearch guard = as;
    guard.n_points = 2048;
    const auto below = optimize_alpha(0.0, 0.0, 0.9, guard);
    v.constants["min_K0@0.9_report_only"] = below.trivial ? 0.0 : cost_K0(below, co).min_K_global;
    v.status = ok ? Status::pass : Status::fail;
    v.message = ok ? "min K0 >= -1e-8 for every b" : "negative K0:" + bad;
    return v;
  });
}

Verdict check_kk_positivity(const std::vector<double>& b_list, const std::vector<double>& eps_list) {
  return guarded("Kk-positivity", [&] {
    Verdict v;
    v.id = "Kk-positivity";
    bool ok = true;
    std::string bad;
    CostOptions co;
    co.report_only = true;
    for (double b : b_list)
      for (double eps : eps_list) {
        const auto opt = optimize_alpha(1.0, eps, b);
        for (double d : {0.0, d_eps_auto(eps)}) {
          const auto c = cost_Kk(opt, d, co);
          const std::string tag = "b=" + num(b) + ",eps=" + num(eps) + ",d=" + num(d);
          v.constants["min_K_certified[" + tag + "]"] = c.min_K_certified;
          v.constants["t_bar[" + tag + "]"] = c.t_bar;
          v.constants["beta_eps[" + tag + "]"] = c.beta_eps;
          if (c.min_K_certified < -1e-8) {
            ok = false;
            bad += " " + tag + ": " + num(c.min_K_certified) + " at t=" + num(c.argmin_K);
          }
        }
      }
    v.status = ok ? Status::pass : Status::fail;
    v.message = ok ? "min Kk over the certified region >= -1e-8" : "negative Kk:" + bad;
    return v;
  });
}

Verdict check_vorticity(const std::vector<const LayerField*>& fields,
                        const std::vector<const OptimalProfile*>& profiles, double box_cells) {
  return guarded("vorticity-control", [&] {
    Verdict v;
    v.id = "vorticity-control";
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    const int ns = 96, nt = 96;
    const double hs = 0.05, ht = 0.05;
    const double L = ns * hs;
    int synthetic_ok = 0, synthetic = 0;
    double worst_excess = -1e300;
    auto record = [&](const ReducedField& r) {
      ++synthetic;
      if (r.control_ok) ++synthetic_ok;
      worst_excess = std::max(worst_excess, r.max_excess);
    };
    auto field = [&](auto&& fn) {
      std::vector<cplx> u(static_cast<std::size_t>(ns) * nt);
      for (int i = 0; i < nt; ++i)
        for (int j = 0; j < ns; ++j) u[static_cast<std::size_t>(i) * ns + j] = fn(j * hs, i * ht);
      return reduced_from_u(std::move(u), ns, nt, hs, ht, 1.0);
    };
    record(field([](double, double) { return cplx(1.0, 0.0); }));
    record(field([&](double s, double) { return std::polar(1.0, 0.7 * std::sin(2.0 * kPi * s / L)); }));
    record(field([&](double s, double) { return std::polar(1.0, 2.0 * kPi * 3.0 * s / L); }));
    record(field([&](double s, double t) { return std::polar(1.0, std::sin(s) * std::cos(t)); }));
    for (int k = 0; k < 5; ++k) {
      std::vector<std::array<double, 5>> modes;
      for (int m = 0; m < 4; ++m) modes.push_back({N(rng), N(rng), N(rng), std::round(3 * N(rng)), 1.5 * std::abs(N(rng))});
      record(field([&](double s, double t) {
        cplx u = 0.5;
        for (const auto& md : modes)
          u += cplx(md[0], md[1]) * std::exp(-(t - md[4]) * (t - md[4])) *
               std::polar(1.0, 2.0 * kPi * md[3] * s / L + md[2]);
        return u;
      }));
    }
    // single vortex at a cell centre
    const double s0 = (ns / 2 + 0.5) * hs, t0 = (nt / 2 + 0.5) * ht;
    const auto vort = field([&](double s, double t) {
      const cplx z(s - s0, t - t0);
      return z / std::abs(z);
    });
    record(vort);
    const int half = static_cast<int>(box_cells / 2);
    const int i0 = nt / 2 - half + 1, i1 = nt / 2 + half + 1, j0 = ns / 2 - half + 1, j1 = ns / 2 + half + 1;
    const double flux = box_vorticity(vort, i0, i1, j0, j1);
    double circ = 0.0;
    auto step = [&](int ia, int ja, int ib, int jb) {
      const cplx a = vort.at(ia, ja), b = vort.at(ib, jb);
      circ += std::abs(a) * std::abs(b) * std::arg(std::conj(a) * b);
    };
    for (int j = j0; j < j1; ++j) step(i0, j, i0, j + 1);
    for (int i = i0; i < i1; ++i) step(i, j1, i + 1, j1);
    for (int j = j1; j > j0; --j) step(i1, j, i1, j - 1);
    for (int i = i1; i > i0; --i) step(i, j0, i - 1, j0);
    const double flux_err = std::abs(flux - 2.0 * kPi) / (2.0 * kPi);
    const double circ_err = std::abs(circ - 2.0 * kPi) / (2.0 * kPi);
    int extracted_ok = 0;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const auto r = compute_current_vorticity(*fields[k], *profiles[k]);
      worst_excess = std::max(worst_excess, r.max_excess);
      if (r.control_ok) ++extracted_ok;
    }
    v.constants = {{"synthetic_fields", static_cast<double>(synthetic)},
                   {"synthetic_ok", static_cast<double>(synthetic_ok)},
                   {"extracted_fields", static_cast<double>(fields.size())},
                   {"extracted_ok", static_cast<double>(extracted_ok)},
                   {"max_excess", worst_excess},
                   {"vortex_flux", flux},
                   {"vortex_circulation", circ},
                   {"vortex_flux_rel_err", flux_err},
                   {"vortex_circulation_rel_err", circ_err}};
    const bool ok = synthetic_ok == synthetic && extracted_ok == static_cast<int>(fields.size()) &&
                    flux_err < 0.01 && circ_err < 0.01;
    v.status = ok ? Status::pass : Status::fail;
    v.message = "|mu(u)| <= |grad u|^2 + 1e-10 on every plaquette; vortex circulation within 1% of 2 pi";
    return v;
  });
}

DiscCellResult run_disc_cell(double eps, double b, const SweepConfig& cfg, const DiscRunOptions& run) {
  DiscCellResult out;
  DiscCell& c = out.cell;
  c.eps = eps;
  c.b = b;
  try {
    if (!in_surface_regime(b)) throw Error(ErrorKind::regime, "trivial regime: b outside (1, 1/Theta0)");
    const double k = 1.0 / cfg.R;
    AlphaSearch as;
    as.c0 = capped_c0(cfg.c0, eps, k);
    as.n_points = cfg.n_points;
    out.profile = optimize_alpha(k, eps, b, as);
    const auto& opt = out.profile;
    if (opt.trivial) throw Error(ErrorKind::regime, "trivial regime: empty alpha window");
    c.alpha_k = opt.alpha_k;
    c.e1d_k = opt.profile.energy;
    DiscGridConfig gc;
    gc.R = cfg.R;
    gc.eps = eps;
    gc.dt0 = cfg.disc_dt0;
    gc.growth = cfg.disc_growth;
    gc.depth_cap = cfg.disc_depth;
    gc.ds = cfg.disc_ds;
    gc.n_r = run.n_r;
    gc.n_theta = run.n_theta;
    const auto grid = DiscGrid::make(gc);
    c.e_trial = build_trial(opt, grid).energy;
    GLOptions go;
    go.seed = cfg.seed;
    go.mode = run.mode;
    GLStarts starts;
    if (run.random_init) {
      starts.runs.push_back(minimize_gl_from(random_start(opt, grid, cfg.seed), go));
    } else {
      starts = minimize_gl(opt, grid, go);
    }
    const auto& best = starts.result();
    out.field = best.field;
    c.converged = true;
    for (const auto& r : starts.runs) c.converged = c.converged && r.converged;
    c.e_min = best.field.energy;
    c.e_min_other = c.e_min;
    for (const auto& r : starts.runs)
      if (&r != &best) c.e_min_other = r.field.energy;
    const auto red = radial_reduction(grid, b, opt);
    c.e_matched = red.energy;
    c.gap = std::abs(c.e_min - 2.0 * kPi * cfg.R * c.e1d_k / eps);
    c.gap_matched = std::abs(c.e_min - c.e_matched);
    const auto dens = density_checks(out.field, red.f, GammaRule{});
    c.l2_err = dens.l2_err;
    c.linf_layer_err = dens.linf_layer_err;
    c.linf_boundary_err = dens.linf_boundary_err;
    const double thr = 0.05 * opt.profile.f.front();
    const auto w = winding_number(out.field, cfg.R, opt.alpha_k, thr);
    const auto w2 = winding_number(out.field, cfg.R - eps / 2.0, opt.alpha_k, thr);
    c.degree = w.degree;
    c.degree_inner = w2.degree;
    c.degree_predicted = w.predicted;
    c.degree_literal = w.predicted_literal;
    c.degree_physical = w.predicted_physical;
    const double a = std::abs(opt.alpha_k);
    const auto ag = agmon_decay_fit(out.field, a + 1.0, a + 4.0);
    c.decay_rate = ag.rate;
    c.decay_quality = ag.quality;
    out.layer = extract_layer_field(out.field, opt);
    const auto sp = split_energy(out.layer, opt);
    c.split_mismatch = std::abs(sp.mismatch) / std::abs(sp.total);
    const auto rt = reduced_terms(out.layer, opt, 0.0);
    c.chain_ok = rt.chain_ok;
    const auto rf = compute_current_vorticity(out.layer, opt);
    c.vorticity_ok = rf.control_ok;
    c.vorticity_excess = rf.max_excess;
    c.u_circulation = boundary_circulation_u(rf);
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return out;
}

Verdict check_disc_energy(const std::vector<DiscCell>& cells) {
  return guarded("disc-energy", [&] {
    Verdict v;
    v.id = "disc-energy";
    const auto cs = usable(cells);
    if (cs.empty()) return skipped("disc-energy", "no 2D cells in the surface regime");
    std::vector<std::pair<double, double>> s, s_cont;
    bool order = true, decreasing = true, conv = true;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto& c = *cs[k];
      v.constants[key("gap_matched", c.eps)] = c.gap_matched;
      v.constants[key("gap_continuum", c.eps)] = c.gap;
      v.constants[key("E_min", c.eps)] = c.e_min;
      v.constants[key("E_trial", c.eps)] = c.e_trial;
      v.constants[key("E_pred", c.eps)] = 2.0 * kPi * c.e1d_k / c.eps;
      v.constants[key("gap_over_eps_log", c.eps)] = c.gap_matched / (c.eps * log_abs(c.eps));
      order = order && c.e_trial >= c.e_min - 1e-12 * std::abs(c.e_min);
      conv = conv && c.converged;
      if (k > 0 && !(c.gap_matched < cs[k - 1]->gap_matched)) decreasing = false;
      s.emplace_back(c.eps, c.gap_matched);
      s_cont.emplace_back(c.eps, c.gap);
    }
    const auto fit = fit_scaling(s, 1.0, 1.0);
    const auto fit_c = fit_scaling(s_cont, 1.0, 1.0);
    v.exponent = fit.p_hat;
    v.exponent_target = 1.0;
    v.constants["C_fit"] = fit.C_hat;
    v.constants["C_envelope"] = fit.envelope;
    v.constants["exponent_continuum"] = fit_c.p_hat;
    v.constants["C_envelope_continuum"] = fit_c.envelope;
    const bool exp_ok = std::abs(fit.p_hat - 1.0) <= 0.5;
    v.status = order && conv && exp_ok && decreasing ? Status::pass : Status::fail;
    std::string msg = "E_trial >= E_min: " + std::string(order ? "yes" : "no") +
                      "; converged: " + (conv ? "yes" : "no") + "; exponent within 0.5 of 1: " +
                      (exp_ok ? "yes" : "no") + "; gap strictly decreasing: " + (decreasing ? "yes" : "no");
    v.message = msg;
    return v;
  });
}

Verdict check_density_l2(const std::vector<DiscCell>& cells) {
  return guarded("density-l2", [&] {
    Verdict v;
    v.id = "density-l2";
    const auto cs = usable(cells);
    if (cs.empty()) return skipped("density-l2", "no 2D cells in the surface regime");
    std::vector<std::pair<double, double>> s;
    for (const auto* c : cs) {
      s.emplace_back(c->eps, c->l2_err);
      v.constants[key("l2_err", c->eps)] = c->l2_err;
    }
    const auto fit = fit_scaling(s, 0.5, 1.5);
    v.exponent = fit.p_hat;
    v.exponent_target = 1.5;
    v.constants["C_fit"] = fit.C_hat;
    v.constants["C_envelope"] = fit.envelope;
    v.status = fit.p_hat >= 1.4 ? Status::pass : Status::fail;
    v.message = "L2 density error exponent >= 1.4 against eps^p |log eps|^(1/2)";
    return v;
  });
}

Verdict check_pan_linf(const std::vector<DiscCell>& cells, double eps) {
  return guarded("pan-linf", [&] {
    Verdict v;
    v.id = "pan-linf";
    for (const auto* c : usable(cells)) {
      if (std::abs(c->eps - eps) > 1e-12) continue;
      v.constants["linf_layer_err"] = c->linf_layer_err;
      v.constants["gamma"] = GammaRule{}.value(eps);
      v.constants["eps"] = eps;
      v.status = c->linf_layer_err < 0.1 ? Status::pass : Status::fail;
      v.message = "sup over the layer f >= |log eps|^-2 of ||Psi| - f| < 0.1";
      return v;
    }
    return skipped("pan-linf", "no converged cell at eps = " + num(eps));
  });
}

Verdict check_pan_boundary(const std::vector<DiscCell>& cells) {
  return guarded("pan-boundary", [&] {
    Verdict v;
    v.id = "pan-boundary";
    const auto cs = usable(cells);
    if (cs.size() < 3) return skipped("pan-boundary", "needs three 2D cells");
    std::vector<std::pair<double, double>> s;
    for (const auto* c : cs) {
      s.emplace_back(c->eps, c->linf_boundary_err);
      v.constants[key("linf_boundary_err", c->eps)] = c->linf_boundary_err;
    }
    const auto fit = fit_scaling(s, 2.0, 0.25);
    v.exponent = fit.p_hat;
    v.exponent_target = 0.25;
    v.constants["C_fit"] = fit.C_hat;
    v.constants["C_envelope"] = fit.envelope;
    v.status = Status::report_only;
    v.message = "boundary sup error against eps^p |log eps|^2; discretisation dominated";
    return v;
  });
}

Verdict check_winding(const std::vector<DiscCell>& cells, double eps) {
  return guarded("winding", [&] {
    Verdict v;
    v.id = "winding";
    const auto cs = usable(cells);
    for (const auto* c : cs) {
      v.constants[key("degree", c->eps)] = static_cast<double>(c->degree);
      v.constants[key("gap_physical", c->eps)] = std::abs(std::abs(c->degree) - c->degree_physical);
    }
    for (const auto* c : cs) {
      if (std::abs(c->eps - eps) > 1e-12) continue;
      const double bound = 3.0 * std::pow(eps, -0.75) * log_abs(eps) * log_abs(eps);
      const double gap = std::abs(std::abs(static_cast<double>(c->degree)) - c->degree_predicted);
      v.constants["degree"] = static_cast<double>(c->degree);
      v.constants["degree_inner_contour"] = static_cast<double>(c->degree_inner);
      v.constants["predicted"] = c->degree_predicted;
      v.constants["predicted_literal"] = c->degree_literal;
      v.constants["predicted_physical"] = c->degree_physical;
      v.constants["gap"] = gap;
      v.constants["gap_literal"] = std::abs(std::abs(static_cast<double>(c->degree)) - c->degree_literal);
      v.constants["bound"] = bound;
      const bool ok = c->degree == c->degree_inner && gap <= bound;
      v.status = ok ? Status::pass : Status::fail;
      v.message = "|deg| against R^2/(2 eps^2) + |alpha_k|/eps; identical degree on r = R and R - eps/2";
      return v;
    }
    return skipped("winding", "no converged cell at eps = " + num(eps));
  });
}

Verdict check_agmon(const std::vector<DiscCell>& cells) {
  return guarded("agmon-decay", [&] {
    Verdict v;
    v.id = "agmon-decay";
    const auto cs = usable(cells);
    if (cs.empty()) return skipped("agmon-decay", "no 2D cells in the surface regime");
    bool ok = true;
    for (const auto* c : cs) {
      v.constants[key("rate", c->eps)] = c->decay_rate;
      v.constants[key("quality", c->eps)] = c->decay_quality;
      ok = ok && c->decay_rate > 0.0 && c->decay_quality >= 0.95;
    }
    v.status = Status::report_only;
    v.message = ok ? "positive decay rate with R^2 >= 0.95 in every cell" : "decay fit below quality";
    return v;
  });
}

Verdict check_u_circulation(const std::vector<DiscCell>& cells) {
  return guarded("u-circulation", [&] {
    Verdict v;
    v.id = "u-circulation";
    const auto cs = usable(cells);
    if (cs.empty()) return skipped("u-circulation", "no 2D cells in the surface regime");
    double C = 0.0;
    for (const auto* c : cs) {
      v.constants[key("circulation", c->eps)] = c->u_circulation;
      C = std::max(C, std::abs(c->u_circulation) / std::pow(log_abs(c->eps), 3));
    }
    v.constants["C_fit"] = C;
    v.status = Status::report_only;
    v.message = "|boundary circulation of u| / |log eps|^3";
    return v;
  });
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json j;
  j["verdicts"] = verdicts;
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : cells)
    cj.push_back({{"eps", c.eps},
                  {"b", c.b},
                  {"alpha_k", c.alpha_k},
                  {"e1d_k", c.e1d_k},
                  {"energy_trial", c.e_trial},
                  {"energy", c.e_min},
                  {"energy_second_start", c.e_min_other},
                  {"energy_matched", c.e_matched},
                  {"energy_gap", c.gap},
                  {"energy_gap_matched", c.gap_matched},
                  {"l2_density_err", c.l2_err},
                  {"linf_layer_err", c.linf_layer_err},
                  {"linf_boundary_err", c.linf_boundary_err},
                  {"degree", c.degree},
                  {"degree_inner", c.degree_inner},
                  {"degree_predicted", c.degree_predicted},
                  {"decay_rate", c.decay_rate},
                  {"u_circulation", c.u_circulation},
                  {"split_mismatch", c.split_mismatch},
                  {"chain_ok", c.chain_ok},
                  {"vorticity_ok", c.vorticity_ok},
                  {"converged", c.converged},
                  {"error", c.error}});
  j["cells"] = cj;
  return j;
}

bool SweepResult::all_pass() const {
  return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.status == Status::fail; });
}

SweepResult run_sweep(const SweepConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  SweepResult out;
  auto add = [&](Verdict v, std::vector<std::string> files = {}) {
    v.artifacts = std::move(files);
    out.verdicts.push_back(std::move(v));
  };
  if (enabled(cfg, "theta0")) add(check_theta0());
  if (enabled(cfg, "oscillator-anchor")) add(check_oscillator_anchor());
  if (enabled(cfg, "trivial-regime")) add(check_trivial_regime(cfg.trivial_samples));
  if (enabled(cfg, "identity-suite")) add(check_identity_suite(cfg.identity_samples, cfg.seed));
  if (enabled(cfg, "K0-positivity")) add(check_k0_positivity(cfg.k0_b_list, cfg.k0_n_points));
  if (enabled(cfg, "Kk-positivity")) add(check_kk_positivity(cfg.kk_b_list, cfg.kk_eps_list));

  const std::vector<std::string> disc_ids{"disc-energy", "density-l2", "pan-linf", "pan-boundary",
                                          "winding", "vorticity-control", "agmon-decay", "u-circulation"};
  const bool need_disc = std::any_of(disc_ids.begin(), disc_ids.end(), [&](const std::string& id) {
    return enabled(cfg, id) && id != "vorticity-control";
  });
  std::vector<DiscCellResult> results;
  std::vector<double> eps_sorted = cfg.eps_list;
  std::sort(eps_sorted.rbegin(), eps_sorted.rend());
  std::vector<double> b_sorted = cfg.b_list;
  std::sort(b_sorted.begin(), b_sorted.end());
  if (need_disc || enabled(cfg, "vorticity-control"))
    for (double b : b_sorted)
      for (double eps : eps_sorted) {
        if (!need_disc && !in_surface_regime(b)) continue;
        results.push_back(run_disc_cell(eps, b, cfg));
      }
  for (const auto& r : results) out.cells.push_back(r.cell);

  std::vector<std::string> cell_files{"disc_cells.csv"};
  {
    std::vector<std::vector<double>> cols(12);
    for (const auto& c : out.cells) {
      const double v[] = {c.eps, c.b, c.alpha_k, c.e1d_k, c.e_trial, c.e_min, c.e_matched,
                          c.gap_matched, c.l2_err, c.linf_layer_err, c.linf_boundary_err,
                          static_cast<double>(c.degree)};
      for (int k = 0; k < 12; ++k) cols[k].push_back(v[k]);
    }
    write_csv(dir / "disc_cells.csv",
              {"eps", "b", "alpha_k", "e1d_k", "energy_trial", "energy", "energy_matched", "gap_matched",
               "l2_density_err", "linf_layer_err", "linf_boundary_err", "degree"},
              cols);
  }
  for (const auto& r : results) {
    if (!r.cell.error.empty()) continue;
    const auto& g = r.field.grid;
    std::vector<std::vector<double>> cols(4);
    const auto fref = profile_on_grid(r.profile, g);
    for (int i = 0; i < g.n_r; ++i) {
      double m = 0.0;
      for (int j = 0; j < g.n_theta; ++j) m += std::abs(r.field.psi[g.idx(i, j)]);
      cols[0].push_back(g.r[i]);
      cols[1].push_back((g.R - g.r[i]) / g.eps);
      cols[2].push_back(m / g.n_theta);
      cols[3].push_back(fref[i]);
    }
    const std::string name = "disc_radial_eps" + num(r.cell.eps) + "_b" + num(r.cell.b) + ".csv";
    write_csv(dir / name, {"r", "t", "mean_abs_psi", "f_k"}, cols);
    cell_files.push_back(name);
  }

  std::vector<DiscCell> in_b;
  double b_main = 0.0;
  for (double b : b_sorted)
    if (in_surface_regime(b)) {
      b_main = b;
      break;
    }
  for (const auto& c : out.cells)
    if (c.b == b_main) in_b.push_back(c);
  if (b_main == 0.0)
    for (const auto& id : disc_ids)
      if (enabled(cfg, id) && id != "vorticity-control")
        add(skipped(id, "no b in the surface regime; 2D checks skipped"));
  if (b_main != 0.0) {
    if (enabled(cfg, "disc-energy")) add(check_disc_energy(in_b), cell_files);
    if (enabled(cfg, "density-l2")) add(check_density_l2(in_b), cell_files);
    if (enabled(cfg, "pan-linf")) add(check_pan_linf(in_b, cfg.pan_eps), cell_files);
    if (enabled(cfg, "pan-boundary")) add(check_pan_boundary(in_b), cell_files);
    if (enabled(cfg, "winding")) add(check_winding(in_b, cfg.winding_eps), cell_files);
    if (enabled(cfg, "agmon-decay")) add(check_agmon(in_b), cell_files);
    if (enabled(cfg, "u-circulation")) add(check_u_circulation(in_b), cell_files);
  }
  if (enabled(cfg, "vorticity-control")) {
    std::vector<const LayerField*> fl;
    std::vector<const OptimalProfile*> pr;
    for (const auto& r : results)
      if (r.cell.error.empty()) {
        fl.push_back(&r.layer);
        pr.push_back(&r.profile);
      }
    add(check_vorticity(fl, pr, cfg.vorticity_box_cells), cell_files);
  }
  std::sort(out.verdicts.begin(), out.verdicts.end(),
            [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  nlohmann::json j = out.to_json();
  j["config"] = cfg;
  std::ofstream(dir / "verdicts.json") << j.dump(2) << '\n';
  return out;
}

}  // namespace surfsc
