#include "surfsc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "surfsc/errors.hpp"

namespace surfsc {

Grid1D uniform_grid(double t_max, int n) {
  if (n < 16) throw Error(ErrorKind::domain, "grid needs at least 16 points");
  if (!(t_max > 0.0)) throw Error(ErrorKind::domain, "interval length must be positive");
  Grid1D g;
  g.t_max = t_max;
  g.h = t_max / (n - 1);
  g.t.resize(n);
  for (int i = 0; i < n; ++i) g.t[i] = i * g.h;
  g.t[n - 1] = t_max;
  return g;
}

double interval_length(double eps, double c0, double T) {
  if (eps < 0.0 || eps >= 1.0) throw Error(ErrorKind::domain, "eps must lie in [0, 1)");
  return eps > 0.0 ? c0 * std::abs(std::log(eps)) : T;
}

double curved_weight(double k, double eps, double t) { return 1.0 - eps * k * t; }

double curved_drift(double k, double alpha, double eps, double t) {
  return (t + alpha - 0.5 * eps * k * t * t) / curved_weight(k, eps, t);
}

double curved_potential(double k, double alpha, double eps, double t) {
  const double d = curved_drift(k, alpha, eps, t);
  return d * d;
}

Functional1D curved_functional(double k, double alpha, double eps, double b, const Grid1D& grid) {
  if (eps == 0.0 && k != 0.0) throw Error(ErrorKind::domain, "eps = 0 requires k = 0");
  const int n = static_cast<int>(grid.t.size());
  if (curved_weight(k, eps, grid.t_max) <= 0.0)
    throw Error(ErrorKind::domain, "weight 1 - eps k t is not positive on the interval");
  Functional1D fn;
  fn.b = b;
  fn.link.resize(n - 1);
  fn.mass.resize(n);
  fn.pot.resize(n);
  for (int i = 0; i + 1 < n; ++i)
    fn.link[i] = curved_weight(k, eps, 0.5 * (grid.t[i] + grid.t[i + 1])) / grid.h;
  for (int i = 0; i < n; ++i) {
    const double m = (i == 0 || i == n - 1) ? 0.5 * grid.h : grid.h;
    fn.mass[i] = m * curved_weight(k, eps, grid.t[i]);
    fn.pot[i] = fn.mass[i] * curved_potential(k, alpha, eps, grid.t[i]);
  }
  return fn;
}

SpectralResult ground_state(const Functional1D& fn, const std::vector<double>& t,
                            bool dirichlet_right, const EigenTolerance& tol) {
  SymTridiag s = fn.quadratic_form();
  std::vector<double> mass = fn.mass;
  if (dirichlet_right) {
    s.diag.pop_back();
    s.off.pop_back();
    mass.pop_back();
  }
  const int m = s.size();
  std::vector<double> isq(m);
  for (int i = 0; i < m; ++i) isq[i] = 1.0 / std::sqrt(mass[i]);
  for (int i = 0; i < m; ++i) s.diag[i] *= isq[i] * isq[i];
  for (int i = 0; i + 1 < m; ++i) s.off[i] *= isq[i] * isq[i + 1];
  const EigenPair ep = lowest_eigenpair(s, tol.tol, tol.max_iter);

  SpectralResult r;
  r.mu = ep.value;
  r.residual = ep.residual;
  r.iterations = ep.iterations;
  r.t = t;
  r.phi.assign(t.size(), 0.0);
  double peak = 0.0;
  for (int i = 0; i < m; ++i) {
    r.phi[i] = ep.vector[i] * isq[i];
    peak = std::max(peak, std::abs(r.phi[i]));
  }
  for (int i = 0; i < m; ++i)
    if (r.phi[i] < 0.0 && r.phi[i] > -1e-13 * peak) r.phi[i] = 0.0;
  return r;
}

double fh_derivative(const SpectralResult& r, double k, double alpha, double eps,
                     const std::vector<double>& mass) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    const double w = curved_weight(k, eps, r.t[i]);
    s += mass[i] * 2.0 * curved_drift(k, alpha, eps, r.t[i]) / w * r.phi[i] * r.phi[i];
  }
  return s;
}

SpectralResult mu_osc(const OscillatorSpec& spec, const EigenTolerance& tol) {
  if (!(spec.truncation_T > 0.0) || spec.n_points < 16)
    throw Error(ErrorKind::domain, "invalid oscillator spec");
  const Grid1D g = uniform_grid(spec.truncation_T, spec.n_points);
  const Functional1D fn = curved_functional(0.0, spec.alpha, 0.0, 1.0, g);
  return ground_state(fn, g.t, true, tol);
}

namespace {

Grid1D curved_grid(const CurvedOperatorSpec& spec) {
  if (spec.eps == 0.0 && spec.k != 0.0) throw Error(ErrorKind::domain, "eps = 0 requires k = 0");
  return uniform_grid(interval_length(spec.eps, spec.c0, spec.truncation_T), spec.n_points);
}

}  // namespace

SpectralResult mu_eps(const CurvedOperatorSpec& spec, const EigenTolerance& tol) {
  const Grid1D g = curved_grid(spec);
  const Functional1D fn = curved_functional(spec.k, spec.alpha, spec.eps, 1.0, g);
  return ground_state(fn, g.t, false, tol);
}

double osc_deviation_constant(const CurvedOperatorSpec& spec) {
  const double me = mu_eps(spec).mu;
  OscillatorSpec os;
  os.alpha = spec.alpha;
  os.truncation_T = interval_length(spec.eps, spec.c0, spec.truncation_T);
  os.n_points = spec.n_points;
  const double mo = mu_osc(os).mu;
  const double l = std::abs(std::log(spec.eps));
  return std::abs(me - mo) / (spec.eps * l * l * l);
}

Theta0Result find_theta0(const Theta0Config& cfg) {
  OscillatorSpec spec;
  spec.truncation_T = cfg.truncation_T;
  spec.n_points = cfg.n_points;
  const Grid1D g = uniform_grid(cfg.truncation_T, cfg.n_points);
  const Functional1D base = curved_functional(0.0, 0.0, 0.0, 1.0, g);

  auto mu_at = [&](double a) {
    spec.alpha = a;
    return mu_osc(spec);
  };
  auto slope_at = [&](double a) {
    const SpectralResult r = mu_at(a);
    return fh_derivative(r, 0.0, a, 0.0, base.mass);
  };

  Theta0Result out;
  const int ns = static_cast<int>(std::floor((cfg.scan_hi - cfg.scan_lo) / cfg.scan_step + 0.5));
  for (int j = 0; j <= ns; ++j) {
    const double a = cfg.scan_lo + j * cfg.scan_step;
    out.trace.emplace_back(a, mu_at(a).mu);
  }
  int turns = 0;
  int imin = 0;
  for (int j = 1; j <= ns; ++j) {
    if (out.trace[j].second < out.trace[imin].second) imin = j;
    if (j + 1 <= ns && out.trace[j].second < out.trace[j - 1].second &&
        out.trace[j].second <= out.trace[j + 1].second)
      ++turns;
  }
  if (turns != 1 || imin == 0 || imin == ns) {
    std::ostringstream os;
    os << "oscillator eigenvalue not unimodal on scan:";
    for (const auto& [a, m] : out.trace) os << " (" << a << ", " << m << ")";
    throw Error(ErrorKind::bracket_failure, os.str());
  }
  double lo = out.trace[imin - 1].first;
  double hi = out.trace[imin + 1].first;
  std::uintmax_t iters = 100;
  const auto root = boost::math::tools::toms748_solve(
      slope_at, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  out.alpha0 = 0.5 * (root.first + root.second);
  out.theta0 = mu_at(out.alpha0).mu;
  return out;
}

AlphaWindow alpha_window(double b, double k, double eps, const WindowConfig& cfg) {
  if (!(b > 0.0)) throw Error(ErrorKind::domain, "b must be positive");
  CurvedOperatorSpec spec;
  spec.k = k;
  spec.eps = eps;
  spec.c0 = cfg.c0;
  spec.n_points = cfg.n_points;
  spec.truncation_T = cfg.truncation_T;
  const double tmax = interval_length(eps, cfg.c0, cfg.truncation_T);
  auto mu_at = [&](double a) {
    spec.alpha = a;
    return mu_eps(spec).mu;
  };
  const double inv_b = 1.0 / b;
  const double lo = -0.5 * tmax;
  const double hi = 2.0;

  AlphaWindow w;
  const int ns = static_cast<int>(std::ceil((hi - lo) / cfg.scan_step));
  for (int j = 0; j <= ns; ++j) {
    const double a = std::min(hi, lo + j * cfg.scan_step);
    w.trace.emplace_back(a, mu_at(a));
  }
  int imin = 0;
  for (int j = 1; j <= ns; ++j)
    if (w.trace[j].second < w.trace[imin].second) imin = j;
  int crossings = 0;
  for (int j = 1; j <= ns; ++j)
    if ((w.trace[j].second < inv_b) != (w.trace[j - 1].second < inv_b)) ++crossings;
  if (crossings > 2) {
    std::ostringstream os;
    os << "more than two crossings of 1/b in the alpha scan:";
    for (const auto& [a, m] : w.trace) os << " (" << a << ", " << m << ")";
    throw Error(ErrorKind::bracket_failure, os.str());
  }

  const double blo = w.trace[std::max(imin - 1, 0)].first;
  const double bhi = w.trace[std::min(imin + 1, ns)].first;
  const auto best = boost::math::tools::brent_find_minima(mu_at, blo, bhi, 40);
  w.alpha_at_min = best.first;
  w.mu_min = best.second;
  if (w.mu_min >= inv_b) return w;
  w.empty = false;

  auto gap = [&](double a) { return mu_at(a) - inv_b; };
  auto solve = [&](double a, double c) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        gap, a, c, boost::math::tools::eps_tolerance<double>(45), iters);
    return 0.5 * (r.first + r.second);
  };
  if (gap(lo) < 0.0) {
    w.lo = lo;
    w.lo_clamped = true;
  } else {
    double a = lo;
    for (const auto& [al, m] : w.trace) {
      if (al >= w.alpha_at_min) break;
      if (m >= inv_b) a = al;
    }
    w.lo = solve(a, w.alpha_at_min);
  }
  double c = hi;
  for (auto it = w.trace.rbegin(); it != w.trace.rend(); ++it) {
    if (it->first <= w.alpha_at_min) break;
    if (it->second >= inv_b) c = it->first;
  }
  w.hi = gap(c) < 0.0 ? c : solve(w.alpha_at_min, c);
  return w;
}

}  // namespace surfsc
