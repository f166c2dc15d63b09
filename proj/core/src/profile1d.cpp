#include "surfsc/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "surfsc/errors.hpp"

namespace surfsc {

Grid1D profile_grid(const ProfileParams& p) {
  if (p.eps == 0.0 && p.k != 0.0) throw Error(ErrorKind::domain, "eps = 0 requires k = 0");
  if (p.k < 0.0) throw Error(ErrorKind::domain, "curvature must be non-negative");
  return uniform_grid(interval_length(p.eps, p.c0, p.truncation_T), p.n_points);
}

Functional1D profile_functional(const ProfileParams& p) {
  return curved_functional(p.k, p.alpha, p.eps, p.b, profile_grid(p));
}

double eps_from_kappa(double kappa, double b) {
  if (!(kappa > 0.0) || !(b > 0.0)) throw Error(ErrorKind::domain, "kappa and b must be positive");
  return 1.0 / (std::sqrt(b) * kappa);
}

Profile1D minimize_profile(const ProfileParams& p, const MinimizeOptions& opt,
                           const std::vector<double>* warm_start) {
  if (!(p.b > 0.0)) throw Error(ErrorKind::domain, "b must be positive");
  const Grid1D g = profile_grid(p);
  const Functional1D fn = curved_functional(p.k, p.alpha, p.eps, p.b, g);
  const int n = fn.size();

  Profile1D out;
  out.params = p;
  out.t = g.t;
  out.h = g.h;
  const SpectralResult gs = ground_state(fn, g.t);
  if (gs.mu >= 1.0 / p.b) {
    out.f.assign(n, 0.0);
    out.trivial = true;
    return out;
  }

  std::vector<double> init =
      (warm_start && static_cast<int>(warm_start->size()) == n) ? *warm_start
                                                               : std::vector<double>(n, 0.5);
  MinimizeResult r = minimize_functional(fn, init, opt);
  if (*std::max_element(r.f.begin(), r.f.end()) == 0.0 || r.energy >= 0.0) {
    const double peak = *std::max_element(gs.phi.begin(), gs.phi.end());
    const double amp = std::sqrt(std::max(1e-6, 1.0 - p.b * gs.mu));
    for (int i = 0; i < n; ++i) init[i] = amp * gs.phi[i] / peak;
    r = minimize_functional(fn, init, opt);
  }
  if (!r.converged) {
    std::ostringstream os;
    os << "profile minimiser stalled at alpha " << p.alpha << ", residual " << r.residual
       << "; energy trace:";
    const std::size_t from = r.trace.size() > 8 ? r.trace.size() - 8 : 0;
    for (std::size_t i = from; i < r.trace.size(); ++i) os << ' ' << r.trace[i];
    throw SolverFailure(os.str(), r.residual);
  }
  if (*std::min_element(r.f.begin(), r.f.end()) < -1e-12)
    throw Error(ErrorKind::internal, "negative profile entry after projection");
  out.f = std::move(r.f);
  out.energy = r.energy;
  out.grad_norm = r.residual;
  out.iterations = r.iterations;
  return out;
}

double fh_integral(const Profile1D& p) {
  const auto& q = p.params;
  const int n = static_cast<int>(p.t.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double m = (i == 0 || i == n - 1) ? 0.5 * p.h : p.h;
    s += m * curved_drift(q.k, q.alpha, q.eps, p.t[i]) * p.f[i] * p.f[i];
  }
  return s;
}

IdentityPair energy_identity(const Profile1D& p) {
  const Functional1D fn = profile_functional(p.params);
  return {fn.energy(p.f), fn.identity_energy(p.f)};
}

double ode_residual(const Profile1D& p, Stencil stencil) {
  if (p.trivial) return 0.0;
  const auto& q = p.params;
  if (stencil == Stencil::discrete) return profile_functional(q).residual(p.f);
  const int n = static_cast<int>(p.t.size());
  const auto& f = p.f;
  const double h = p.h;
  double r = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    const double d1 = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    const double d2 =
        (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
    const double t = p.t[i];
    const double w = curved_weight(q.k, q.eps, t);
    const double v = curved_potential(q.k, q.alpha, q.eps, t);
    const double e = -d2 + q.eps * q.k / w * d1 + v * f[i] - (1.0 - f[i] * f[i]) * f[i] / q.b;
    r = std::max(r, std::abs(e));
  }
  return r;
}

std::vector<double> profile_derivative(const Profile1D& p) {
  const int n = static_cast<int>(p.f.size());
  std::vector<double> d(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) d[i] = (p.f[i + 1] - p.f[i - 1]) / (2.0 * p.h);
  return d;
}

PointwiseReport pointwise_bounds_check(const Profile1D& p, double ratio_cap) {
  PointwiseReport r;
  if (p.trivial) return r;
  double log_c_up = -std::numeric_limits<double>::infinity();
  double log_c_lo = std::numeric_limits<double>::infinity();
  const double a = p.params.alpha;
  for (std::size_t i = 0; i < p.f.size(); ++i) {
    const double t = p.t[i];
    const double lf = p.f[i] > 0.0 ? std::log(p.f[i]) : -std::numeric_limits<double>::infinity();
    log_c_up = std::max(log_c_up, lf + 0.5 * (t + a) * (t + a));
    log_c_lo = std::min(log_c_lo, lf + 0.5 * (t + std::sqrt(2.0)) * (t + std::sqrt(2.0)));
  }
  r.C_upper = std::exp(log_c_up);
  r.c_lower = std::exp(log_c_lo);
  r.ratio = std::exp(log_c_up - log_c_lo);
  r.ok = std::isfinite(log_c_lo) && std::isfinite(log_c_up) && r.c_lower > 0.0 &&
         std::isfinite(r.ratio) && r.ratio <= ratio_cap;
  return r;
}

GradientReport gradient_bound_check(const Profile1D& p) {
  const auto& q = p.params;
  if (!(q.eps > 0.0)) throw Error(ErrorKind::precondition, "gradient bounds need eps > 0");
  GradientReport r;
  if (p.trivial) return r;
  const double l3 = std::pow(std::abs(std::log(q.eps)), 3);
  const double split = std::abs(q.alpha) + 2.0 / std::sqrt(q.b);
  r.monotone_from = std::max(0.0, -q.alpha + 1.0 / std::sqrt(q.b));
  const auto d = profile_derivative(p);
  const int n = static_cast<int>(p.f.size());
  bool tail_finite = true;
  r.monotone_tail = true;
  for (int i = 0; i < n; ++i) {
    if (p.t[i] <= split) {
      r.C_near = std::max(r.C_near, std::abs(d[i]));
    } else if (p.f[i] > 0.0) {
      r.C_tail = std::max(r.C_tail, std::abs(d[i]) / p.f[i] / l3);
    } else {
      tail_finite = false;
    }
    if (i + 1 < n && p.t[i] >= r.monotone_from && p.f[i + 1] > p.f[i] + 1e-12)
      r.monotone_tail = false;
  }
  r.ok = r.monotone_tail && tail_finite && std::isfinite(r.C_near) && std::isfinite(r.C_tail);
  return r;
}

OptimalProfile optimize_alpha(double k, double eps, double b, const AlphaSearch& cfg) {
  if (cfg.regime_guard && !in_surface_regime(b))
    throw Error(ErrorKind::regime, "b must satisfy 1 < b < 1/Theta0");
  WindowConfig wc;
  wc.c0 = cfg.c0;
  wc.n_points = cfg.n_points;
  wc.truncation_T = cfg.truncation_T;
  const AlphaWindow w = alpha_window(b, k, eps, wc);

  ProfileParams p;
  p.k = k;
  p.eps = eps;
  p.b = b;
  p.c0 = cfg.c0;
  p.n_points = cfg.n_points;
  p.truncation_T = cfg.truncation_T;

  OptimalProfile out;
  if (w.empty) {
    p.alpha = w.alpha_at_min;
    out.trivial = true;
    out.alpha_k = w.alpha_at_min;
    out.profile = minimize_profile(p);
    return out;
  }

  std::vector<double> warm;
  auto solve = [&](double a) {
    p.alpha = a;
    Profile1D pr = minimize_profile(p, {}, warm.empty() ? nullptr : &warm);
    if (!pr.trivial) warm = pr.f;
    return pr;
  };

  const double width = w.hi - w.lo;
  const int m = std::max(20, static_cast<int>(std::ceil(width / cfg.scan_step)));
  std::vector<double> as(m), es(m);
  for (int j = 0; j < m; ++j) {
    as[j] = w.lo + (j + 0.5) * width / m;
    es[j] = solve(as[j]).energy;
    out.scan.emplace_back(as[j], es[j]);
  }
  int jbest = 0;
  for (int j = 0; j < m; ++j) {
    const bool left = j == 0 || es[j] < es[j - 1];
    const bool right = j == m - 1 || es[j] <= es[j + 1];
    if (left && right) out.local_minima.push_back(as[j]);
    if (es[j] < es[jbest]) jbest = j;
  }

  const double a_lo = jbest > 0 ? as[jbest - 1] : w.lo;
  const double a_hi = jbest + 1 < m ? as[jbest + 1] : w.hi;
  warm.clear();
  solve(as[jbest]);
  const auto golden = boost::math::tools::brent_find_minima(
      [&](double a) { return solve(a).energy; }, a_lo, a_hi, 30);

  auto fh = [&](double a) { return fh_integral(solve(a)); };
  double lo = a_lo, hi = a_hi;
  double flo = fh(lo), fhi = fh(hi);
  double alpha = golden.first;
  if (flo < 0.0 && fhi > 0.0) {
    std::uintmax_t iters = 200;
    auto tol = [&](double x, double y) { return std::abs(x - y) <= cfg.alpha_tol * 1e-4; };
    const auto r = boost::math::tools::toms748_solve(fh, lo, hi, flo, fhi, tol, iters);
    alpha = 0.5 * (r.first + r.second);
  }
  out.alpha_k = alpha;
  out.profile = solve(alpha);
  out.fh_residual = fh_integral(out.profile);
  return out;
}

}  // namespace surfsc
