#include "surfsc/costfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "surfsc/errors.hpp"

namespace surfsc {

std::vector<double> potential_F(const OptimalProfile& opt, double fh_tolerance) {
  const Profile1D& p = opt.profile;
  const int n = static_cast<int>(p.t.size());
  std::vector<double> F(n, 0.0);
  if (opt.trivial || p.trivial) return F;
  if (!(std::abs(opt.fh_residual) <= fh_tolerance))
    throw Error(ErrorKind::precondition, "profile is not alpha-optimal");
  const auto& q = p.params;
  std::vector<double> integrand(n);
  for (int i = 0; i < n; ++i)
    integrand[i] = 2.0 * curved_drift(q.k, q.alpha, q.eps, p.t[i]) * p.f[i] * p.f[i];
  for (int i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * p.h * (integrand[i - 1] + integrand[i]);
  return F;
}

std::vector<double> F0_closed_form(const Profile1D& p) {
  const auto& q = p.params;
  const std::size_t n = p.f.size();
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f2 = p.f[i] * p.f[i];
    const double s = p.t[i] + q.alpha;
    double d2 = 0.0;
    if (i > 0 && i + 1 < n) d2 = (p.f[i + 1] - p.f[i]) * (p.f[i] - p.f[i - 1]) / (p.h * p.h);
    c[i] = -d2 + s * s * f2 - f2 / q.b + f2 * f2 / (2.0 * q.b);
  }
  return c;
}

namespace {

std::vector<double> F0_discrepancy(const OptimalProfile& opt) {
  if (opt.profile.params.k != 0.0) throw Error(ErrorKind::precondition, "closed form needs k = 0");
  const auto F = potential_F(opt);
  const auto c = F0_closed_form(opt.profile);
  std::vector<double> d(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) d[i] = F[i] - c[i];
  return d;
}

}  // namespace

double F0_closed_form_check(const OptimalProfile& opt) {
  double m = 0.0;
  for (double v : F0_discrepancy(opt)) m = std::max(m, std::abs(v));
  return m;
}

double F0_closed_form_richardson(double b, const AlphaSearch& cfg) {
  AlphaSearch fine = cfg;
  fine.n_points = 2 * cfg.n_points - 1;
  const auto dc = F0_discrepancy(optimize_alpha(0.0, 0.0, b, cfg));
  const auto df = F0_discrepancy(optimize_alpha(0.0, 0.0, b, fine));
  double m = 0.0;
  for (std::size_t i = 0; i < dc.size(); ++i)
    m = std::max(m, std::abs((4.0 * df[2 * i] - dc[i]) / 3.0));
  return m;
}

double d_eps_auto(double eps) { return 0.5 * std::pow(std::abs(std::log(eps)), -4.0); }

namespace {

CostCurve base_curve(const OptimalProfile& opt, double d_eps) {
  CostCurve c;
  const Profile1D& p = opt.profile;
  c.t = p.t;
  c.f = p.f;
  c.F = potential_F(opt);
  c.d_eps = d_eps;
  c.K.resize(c.t.size());
  for (std::size_t i = 0; i < c.t.size(); ++i) c.K[i] = (1.0 - d_eps) * c.f[i] * c.f[i] + c.F[i];
  c.min_K_global = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.K.size(); ++i)
    if (c.K[i] < c.min_K_global) {
      c.min_K_global = c.K[i];
      c.argmin_K = c.t[i];
    }
  return c;
}

void certify(CostCurve& c, const CostOptions& o, const char* name) {
  c.min_K_certified = std::numeric_limits<double>::infinity();
  double where = 0.0;
  for (std::size_t i = 0; i < c.K.size(); ++i)
    if (c.in_region[i] && c.K[i] < c.min_K_certified) {
      c.min_K_certified = c.K[i];
      where = c.t[i];
    }
  c.certified = c.min_K_certified >= -o.tolerance;
  if (!c.certified && !o.report_only) {
    std::ostringstream os;
    os << name << " negative: " << c.min_K_certified << " at t = " << where;
    throw Error(ErrorKind::certificate_failure, os.str());
  }
}

}  // namespace

CostCurve cost_K0(const OptimalProfile& opt, const CostOptions& o) {
  const auto& q = opt.profile.params;
  if (q.k != 0.0 || q.eps != 0.0) throw Error(ErrorKind::precondition, "K0 needs k = 0, eps = 0");
  if (!o.report_only && !(q.b >= 1.0 && q.b * kTheta0Reference < 1.0))
    throw Error(ErrorKind::regime, "K0 certificate needs 1 <= b < 1/Theta0");
  CostCurve c = base_curve(opt, 0.0);
  c.t_bar = c.t.back();
  c.in_region.assign(c.t.size(), true);
  certify(c, o, "K0");

  // At an interior local minimum t0 of K, 2 f f' + 2 (t0 + alpha) f^2 = 0; locate the
  // root of that derivative and compare K there with (1 - 1/b) f^2 + f^4/(2b).
  const Profile1D& p = opt.profile;
  const auto d = profile_derivative(p);
  const int n = static_cast<int>(c.t.size());
  auto kprime = [&](int i) { return 2.0 * p.f[i] * d[i] + 2.0 * (p.t[i] + q.alpha) * p.f[i] * p.f[i]; };
  auto closed = [&](double f) { return (1.0 - 1.0 / q.b) * f * f + f * f * f * f / (2.0 * q.b); };
  for (int i = 1; i + 1 < n; ++i) {
    if (!(c.K[i] <= c.K[i - 1] && c.K[i] < c.K[i + 1]) || c.K[i] <= 1e-10) continue;
    int j0 = i, j1 = i + 1;
    if (kprime(i) > 0.0) {
      j0 = i - 1;
      j1 = i;
    }
    const double g0 = kprime(j0), g1 = kprime(j1);
    const double s = (g1 != g0) ? std::clamp(g0 / (g0 - g1), 0.0, 1.0) : 0.5;
    const double kt = c.K[j0] + s * (c.K[j1] - c.K[j0]);
    const double ft = p.f[j0] + s * (p.f[j1] - p.f[j0]);
    c.critical_identity_err = std::max(c.critical_identity_err, std::abs(kt - closed(ft)));
    ++c.critical_points;
  }
  return c;
}

CostCurve cost_Kk(const OptimalProfile& opt, double d_eps, const CostOptions& o) {
  const auto& q = opt.profile.params;
  if (!(q.k > 0.0) || !(q.eps > 0.0)) throw Error(ErrorKind::precondition, "Kk needs k > 0 and eps > 0");
  if (!o.report_only && !in_surface_regime(q.b))
    throw Error(ErrorKind::regime, "Kk certificate needs 1 < b < 1/Theta0");
  if (d_eps < 0.0) throw Error(ErrorKind::domain, "d_eps must be non-negative");
  CostCurve c = base_curve(opt, d_eps);
  const int n = static_cast<int>(c.t.size());
  const double l = std::abs(std::log(q.eps));
  const double fe = c.f.back();
  const double level = l * l * l * fe;
  int ibar = -1;
  for (int i = n - 1; i >= 0; --i)
    if (c.f[i] >= level && c.f[i] > 0.0) {
      ibar = i;
      break;
    }
  if (ibar < 0) throw Error(ErrorKind::domain, "certified region not found; profile does not decay");
  c.t_bar = c.t[ibar];
  c.in_region.resize(n);
  for (int i = 0; i < n; ++i) c.in_region[i] = i <= ibar;
  const double te = c.t.back();
  c.beta_eps = (curved_potential(q.k, q.alpha, q.eps, te) - (1.0 - fe * fe) / q.b) * fe * fe;
  c.intermediate_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double f2 = c.f[i] * c.f[i];
    c.intermediate_margin =
        std::min(c.intermediate_margin, f2 + c.F[i] - (f2 / (l * l * l) - c.beta_eps));
  }
  certify(c, o, "Kk");
  return c;
}

}  // namespace surfsc
