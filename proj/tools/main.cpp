#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "surfsc/costfn.hpp"
#include "surfsc/errors.hpp"
#include "surfsc/report.hpp"

using namespace surfsc;
using nlohmann::json;

namespace {

std::filesystem::path sibling_json(const std::string& path) {
  return std::filesystem::path(path).replace_extension(".json");
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  return json::parse(in);
}

// CSV to a file, or stdout when path is empty.
class Csv {
 public:
  explicit Csv(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::io, "cannot write " + path);
    }
    out().precision(17);
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  template <class... T>
  void row(const T&... v) {
    int k = 0;
    ((out() << (k++ ? "," : "") << v), ...);
    out() << '\n';
  }

 private:
  std::ofstream file_;
};

struct ProfileArgs {
  double k = 0.0;
  double eps = 0.0;
  double b = 1.5;
  double alpha = 0.0;
  bool optimize = false;
  double c0 = 4.0;
  int grid_n = 2048;
};

OptimalProfile solve_profile(const ProfileArgs& a) {
  if (a.optimize) {
    AlphaSearch as;
    as.c0 = a.c0;
    as.n_points = a.grid_n;
    return optimize_alpha(a.k, a.eps, a.b, as);
  }
  ProfileParams p;
  p.k = a.k;
  p.eps = a.eps;
  p.b = a.b;
  p.alpha = a.alpha;
  p.c0 = a.c0;
  p.n_points = a.grid_n;
  OptimalProfile o;
  o.alpha_k = a.alpha;
  o.profile = minimize_profile(p);
  o.trivial = o.profile.trivial;
  o.fh_residual = fh_integral(o.profile);
  return o;
}

json profile_json(const ProfileArgs& a, const OptimalProfile& o) {
  json j{{"k", a.k}, {"eps", a.eps}, {"b", a.b}, {"c0", a.c0}, {"grid_n", a.grid_n},
         {"optimized", a.optimize}, {"alpha", o.alpha_k}, {"alpha_k", o.alpha_k},
         {"energy", o.profile.energy}, {"fh_residual", o.fh_residual}, {"trivial", o.trivial}};
  if (!o.trivial) {
    const auto pw = pointwise_bounds_check(o.profile);
    const auto gb = gradient_bound_check(o.profile);
    j["bound_fits"] = {{"C_upper", pw.C_upper}, {"c_lower", pw.c_lower}, {"pointwise_ok", pw.ok},
                       {"C_near", gb.C_near}, {"C_tail", gb.C_tail}, {"monotone_tail", gb.monotone_tail},
                       {"monotone_from", gb.monotone_from}, {"gradient_ok", gb.ok}};
  }
  return j;
}

ProfileArgs profile_args_from(const json& j) {
  ProfileArgs a;
  a.k = j.at("k").get<double>();
  a.eps = j.at("eps").get<double>();
  a.b = j.at("b").get<double>();
  a.c0 = j.at("c0").get<double>();
  a.grid_n = j.at("grid_n").get<int>();
  a.optimize = j.at("optimized").get<bool>();
  a.alpha = j.at("alpha").get<double>();
  return a;
}

std::vector<double> parse_scan(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4 || parts[0] != "alpha")
    throw Error(ErrorKind::domain, "--scan expects alpha:lo:hi:step");
  const double lo = std::stod(parts[1]), hi = std::stod(parts[2]), step = std::stod(parts[3]);
  if (!(step > 0.0) || hi < lo) throw Error(ErrorKind::domain, "--scan needs lo <= hi and step > 0");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface superconductivity numerics"};
  app.require_subcommand(1);

  double sp_alpha = 0.0, sp_k = 0.0, sp_eps = 0.0, sp_c0 = 4.0;
  int sp_n = 2048;
  std::string sp_scan, sp_out;
  auto* spectral = app.add_subcommand("spectral", "Lowest eigenvalue of the 1D operator");
  spectral->add_option("--alpha", sp_alpha);
  spectral->add_option("--k", sp_k)->check(CLI::NonNegativeNumber);
  spectral->add_option("--eps", sp_eps)->check(CLI::Range(0.0, 1.0));
  spectral->add_option("--c0", sp_c0)->check(CLI::PositiveNumber);
  spectral->add_option("--grid-n", sp_n)->check(CLI::Range(16, 1 << 22));
  spectral->add_option("--scan", sp_scan, "alpha:lo:hi:step");
  spectral->add_option("--out", sp_out, "CSV path, stdout if omitted");

  int th_n = 4097;
  std::string th_out;
  auto* theta = app.add_subcommand("find-theta0", "De Gennes constant as JSON");
  theta->add_option("--grid-n", th_n)->check(CLI::Range(64, 1 << 22));
  theta->add_option("--out", th_out, "JSON path, stdout if omitted");

  ProfileArgs pa;
  std::string pr_out = "profile.csv";
  auto* profile = app.add_subcommand("profile", "1D minimiser");
  profile->add_option("--k", pa.k)->check(CLI::NonNegativeNumber);
  profile->add_option("--eps", pa.eps)->check(CLI::Range(0.0, 1.0));
  profile->add_option("--b", pa.b)->check(CLI::PositiveNumber);
  auto* alpha_opt = profile->add_option("--alpha", pa.alpha);
  profile->add_flag("--optimize-alpha", pa.optimize)->excludes(alpha_opt);
  profile->add_option("--c0", pa.c0)->check(CLI::PositiveNumber);
  profile->add_option("--grid-n", pa.grid_n)->check(CLI::Range(16, 1 << 22));
  profile->add_option("--out", pr_out, "CSV path; the JSON summary goes next to it");

  std::string co_from, co_d = "auto", co_out = "cost.csv";
  auto* cost = app.add_subcommand("cost", "Cost function K for an optimal profile");
  cost->add_option("--from-profile", co_from)->required();
  cost->add_option("--d-eps", co_d, "auto or a value");
  cost->add_option("--out", co_out, "CSV path; the JSON summary goes next to it");

  std::string ly_field, ly_profile, ly_variant = "disc", ly_out = "split.json";
  auto* layer = app.add_subcommand("layer", "Energy splitting of a boundary-layer field");
  layer->add_option("--field", ly_field)->required();
  layer->add_option("--profile", ly_profile)->required();
  layer->add_option("--variant", ly_variant)->check(CLI::IsMember({"disc", "flat"}));
  layer->add_option("--out", ly_out);

  double gl_eps = 0.08, gl_b = 1.5, gl_R = 1.0;
  std::string gl_mode = "fixed", gl_grid, gl_init = "trial", gl_out = "field.bin", gl_report = "report.json";
  std::uint64_t gl_seed = 1;
  auto* gl2d = app.add_subcommand("gl2d", "2D disc minimiser");
  gl2d->add_option("--eps", gl_eps)->check(CLI::Range(0.0, 1.0));
  gl2d->add_option("--b", gl_b)->check(CLI::PositiveNumber);
  gl2d->add_option("--R", gl_R)->check(CLI::PositiveNumber);
  gl2d->add_option("--mode", gl_mode)->check(CLI::IsMember({"fixed", "coupled"}));
  gl2d->add_option("--grid", gl_grid, "nr:ntheta");
  gl2d->add_option("--seed", gl_seed);
  gl2d->add_option("--init", gl_init)->check(CLI::IsMember({"trial", "random"}));
  gl2d->add_option("--out", gl_out, "layer field of the minimiser");
  gl2d->add_option("--report", gl_report);

  std::string vf_config, vf_out = "verdicts.json", vf_only;
  auto* verify = app.add_subcommand("verify", "Run the verification sweep");
  verify->add_option("--config", vf_config);
  verify->add_option("--out", vf_out);
  verify->add_option("--only", vf_only, "comma separated verdict ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectral) {
      const auto alphas = sp_scan.empty() ? std::vector<double>{sp_alpha} : parse_scan(sp_scan);
      if (sp_eps == 0.0 && sp_k != 0.0) throw Error(ErrorKind::domain, "eps = 0 requires k = 0");
      Csv csv(sp_out);
      csv.row("alpha", "k", "eps", "mu", "residual");
      for (double a : alphas) {
        SpectralResult r;
        if (sp_eps == 0.0) {
          OscillatorSpec s;
          s.alpha = a;
          s.n_points = sp_n;
          r = mu_osc(s);
        } else {
          CurvedOperatorSpec s;
          s.k = sp_k;
          s.alpha = a;
          s.eps = sp_eps;
          s.c0 = sp_c0;
          s.n_points = sp_n;
          r = mu_eps(s);
        }
        csv.row(a, sp_k, sp_eps, r.mu, r.residual);
      }
    } else if (*theta) {
      Theta0Config c;
      c.n_points = th_n;
      const auto r = find_theta0(c);
      const json j{{"theta0", r.theta0}, {"alpha0", r.alpha0}, {"inv_theta0", 1.0 / r.theta0}};
      if (th_out.empty())
        std::cout << std::setprecision(17) << j.dump(2) << '\n';
      else
        write_json(th_out, j);
    } else if (*profile) {
      if (!pa.optimize && alpha_opt->count() == 0)
        throw Error(ErrorKind::domain, "profile needs --alpha or --optimize-alpha");
      const auto o = solve_profile(pa);
      const auto& p = o.profile;
      const auto fp = profile_derivative(p);
      const auto fn = profile_functional(p.params);
      const auto g = fn.gradient(p.f);
      Csv csv(pr_out);
      csv.row("t", "f", "f_prime", "V", "residual");
      for (std::size_t i = 0; i < p.t.size(); ++i)
        csv.row(p.t[i], p.f[i], fp[i], curved_potential(pa.k, o.alpha_k, pa.eps, p.t[i]),
                g[i] / (2.0 * fn.mass[i]));
      write_json(sibling_json(pr_out), profile_json(pa, o));
    } else if (*cost) {
      const auto j = read_json(co_from);
      const auto a = profile_args_from(j);
      const auto o = solve_profile(a);
      CostOptions opt;
      opt.report_only = true;
      CostCurve c;
      if (a.k == 0.0 && a.eps == 0.0) {
        c = cost_K0(o, opt);
      } else {
        const double d = co_d == "auto" ? d_eps_auto(a.eps) : std::stod(co_d);
        c = cost_Kk(o, d, opt);
      }
      Csv csv(co_out);
      csv.row("t", "f", "F", "K", "in_certified_region");
      for (std::size_t i = 0; i < c.t.size(); ++i) csv.row(c.t[i], c.f[i], c.F[i], c.K[i], c.in_region[i] ? 1 : 0);
      write_json(sibling_json(co_out), {{"t_bar", c.t_bar},
                                        {"beta_eps", c.beta_eps},
                                        {"d_eps", c.d_eps},
                                        {"min_K_certified", c.min_K_certified},
                                        {"min_K_global", c.min_K_global},
                                        {"argmin_K", c.argmin_K},
                                        {"certified", c.certified}});
    } else if (*layer) {
      const auto a = profile_args_from(read_json(ly_profile));
      const auto o = solve_profile(a);
      const auto fld = read_layer_field(ly_field, a.c0);
      const Variant v = ly_variant == "flat" ? Variant::flat : Variant::disc;
      const auto sp = split_energy(fld, o, v);
      const auto rt = reduced_terms(fld, o, 0.0, v);
      const auto rf = compute_current_vorticity(fld, o);
      write_json(ly_out, {{"total", sp.total},
                          {"main", sp.main},
                          {"reduced", sp.reduced},
                          {"mismatch", sp.mismatch},
                          {"kinetic_t", rt.kinetic_t},
                          {"kinetic_s", rt.kinetic_s},
                          {"momentum", rt.momentum},
                          {"quartic", rt.quartic},
                          {"certified_lower_bound", rt.certified_lower_bound},
                          {"chain_ok", rt.chain_ok},
                          {"vorticity_control_ok", rf.control_ok},
                          {"vorticity_max_excess", rf.max_excess},
                          {"u_circulation", boundary_circulation_u(rf)}});
    } else if (*gl2d) {
      SweepConfig cfg;
      cfg.R = gl_R;
      cfg.seed = gl_seed;
      DiscRunOptions run;
      run.mode = gl_mode == "coupled" ? GaugeMode::coupled : GaugeMode::fixed;
      run.random_init = gl_init == "random";
      if (!gl_grid.empty()) {
        const auto colon = gl_grid.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::domain, "--grid expects nr:ntheta");
        run.n_r = std::stoi(gl_grid.substr(0, colon));
        run.n_theta = std::stoi(gl_grid.substr(colon + 1));
      }
      const auto r = run_disc_cell(gl_eps, gl_b, cfg, run);
      if (!r.cell.error.empty()) throw std::runtime_error(r.cell.error);
      const auto& c = r.cell;
      write_layer_field(r.layer, gl_out);
      ProfileArgs used;
      used.k = 1.0 / gl_R;
      used.eps = gl_eps;
      used.b = gl_b;
      used.c0 = capped_c0(cfg.c0, gl_eps, used.k);
      used.grid_n = cfg.n_points;
      used.optimize = true;
      write_json(std::filesystem::path(gl_out).replace_extension(".profile.json"), profile_json(used, r.profile));
      write_json(gl_report, {{"energy", c.e_min},
                             {"e1d_k", c.e1d_k},
                             {"alpha_k", c.alpha_k},
                             {"energy_gap", c.gap},
                             {"energy_gap_matched", c.gap_matched},
                             {"l2_density_err", c.l2_err},
                             {"linf_boundary_err", c.linf_boundary_err},
                             {"degree", c.degree},
                             {"degree_predicted", c.degree_predicted},
                             {"decay_rate", c.decay_rate},
                             {"converged", c.converged},
                             {"mode", gl_mode}});
    } else if (*verify) {
      SweepConfig cfg;
      if (!vf_config.empty()) cfg = read_json(vf_config).get<SweepConfig>();
      if (!vf_only.empty()) {
        cfg.only.clear();
        std::stringstream ss(vf_only);
        for (std::string id; std::getline(ss, id, ',');)
          if (!id.empty()) cfg.only.push_back(id);
      }
      const auto r = run_sweep(cfg);
      auto j = r.to_json();
      j["config"] = cfg;
      write_json(vf_out, j);
      for (const auto& v : r.verdicts) std::cout << v.id << ": " << to_string(v.status) << '\n';
      return r.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "surfsc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
