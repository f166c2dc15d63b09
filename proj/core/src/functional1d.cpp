#include "surfsc/functional1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surfsc {

double Functional1D::energy(const std::vector<double>& f) const {
  const int n = size();
  double e = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    e += link[i] * d * d;
  }
  for (int i = 0; i < n; ++i) {
    const double f2 = f[i] * f[i];
    e += (pot[i] - mass[i] / b) * f2 + mass[i] * f2 * f2 / (2.0 * b);
  }
  return e;
}

std::vector<double> Functional1D::gradient(const std::vector<double>& f) const {
  const int n = size();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double kf = 0.0;
    if (i > 0) kf += link[i - 1] * (f[i] - f[i - 1]);
    if (i + 1 < n) kf += link[i] * (f[i] - f[i + 1]);
    g[i] = 2.0 * kf + 2.0 * (pot[i] - mass[i] / b) * f[i] + 2.0 / b * mass[i] * f[i] * f[i] * f[i];
  }
  return g;
}

SymTridiag Functional1D::hessian(const std::vector<double>& f) const {
  const int n = size();
  SymTridiag h;
  h.diag.resize(n);
  h.off.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    if (i > 0) d += link[i - 1];
    if (i + 1 < n) d += link[i];
    h.diag[i] = 2.0 * d + 2.0 * (pot[i] - mass[i] / b) + 6.0 / b * mass[i] * f[i] * f[i];
  }
  for (int i = 0; i + 1 < n; ++i) h.off[i] = -2.0 * link[i];
  return h;
}

SymTridiag Functional1D::quadratic_form() const {
  const int n = size();
  SymTridiag s;
  s.diag.assign(pot.begin(), pot.end());
  s.off.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    s.diag[i] += link[i];
    s.diag[i + 1] += link[i];
    s.off[i] = -link[i];
  }
  return s;
}

double Functional1D::residual(const std::vector<double>& f) const {
  const auto g = gradient(f);
  double r = 0.0;
  for (int i = 0; i < size(); ++i) r = std::max(r, std::abs(g[i]) / (2.0 * mass[i]));
  return r;
}

double Functional1D::identity_energy(const std::vector<double>& f) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += mass[i] * std::pow(f[i], 4);
  return -s / (2.0 * b);
}

namespace {

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Runs BB steps until the residual drops below tol or the budget is spent.
void bb_steps(const Functional1D& fn, MinimizeResult& st, double tol, int budget) {
  const int n = fn.size();
  auto g = fn.gradient(st.f);
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = g[i] / (2.0 * fn.mass[i]);
  double tau = 1e-3;
  for (int it = 0; it < budget; ++it) {
    double r = max_abs(z);
    if (r <= tol) break;
    std::vector<double> fnew(n);
    double enew = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      for (int i = 0; i < n; ++i) fnew[i] = std::max(0.0, st.f[i] - tau * z[i]);
      enew = fn.energy(fnew);
      double lin = 0.0;
      for (int i = 0; i < n; ++i) lin += g[i] * (fnew[i] - st.f[i]);
      if (enew <= st.energy + 1e-4 * lin || max_abs(fnew) == 0.0 ||
          std::abs(enew - st.energy) <= 1e-15 * std::max(1.0, std::abs(st.energy)))
        break;
      tau *= 0.5;
    }
    auto gnew = fn.gradient(fnew);
    std::vector<double> znew(n);
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      znew[i] = gnew[i] / (2.0 * fn.mass[i]);
      const double s = fnew[i] - st.f[i];
      ss += fn.mass[i] * s * s;
      sy += fn.mass[i] * s * (znew[i] - z[i]);
    }
    tau = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e6) : 1e-3;
    st.f = std::move(fnew);
    st.energy = enew;
    g = std::move(gnew);
    z = std::move(znew);
    st.trace.push_back(enew);
    ++st.iterations;
  }
  st.residual = max_abs(z);
}

}  // namespace

MinimizeResult minimize_projected_bb(const Functional1D& fn, std::vector<double> init,
                                     const MinimizeOptions& opt) {
  MinimizeResult st;
  for (auto& v : init) v = std::max(v, 0.0);
  st.f = std::move(init);
  st.energy = fn.energy(st.f);
  bb_steps(fn, st, opt.grad_tol, opt.max_gradient_steps);
  st.tolerance = opt.grad_tol;
  st.converged = st.residual <= opt.grad_tol;
  return st;
}

MinimizeResult minimize_functional(const Functional1D& fn, std::vector<double> init,
                                   const MinimizeOptions& opt) {
  const int n = fn.size();
  MinimizeResult st;
  for (auto& v : init) v = std::max(v, 0.0);
  st.f = std::move(init);
  st.energy = fn.energy(st.f);
  // Round-off floor of the scaled residual: the stencil amplifies representation error by
  // (link_{i-1} + link_i) / mass_i.
  double stiff = 0.0;
  for (int i = 0; i < n; ++i) {
    double l = 0.0;
    if (i > 0) l += fn.link[i - 1];
    if (i + 1 < n) l += fn.link[i];
    stiff = std::max(stiff, l / fn.mass[i]);
  }
  const double tol = std::max(opt.grad_tol, 4.0 * std::numeric_limits<double>::epsilon() * stiff *
                                                std::max(1.0, max_abs(st.f)));
  int bb_budget = opt.max_gradient_steps;
  double lambda = 0.0;
  int polished = 0;
  double last_res = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opt.max_newton; ++it) {
    const auto g = fn.gradient(st.f);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(g[i]) / (2.0 * fn.mass[i]));
    st.residual = res;
    if (res <= tol) {
      if (polished >= opt.polish_steps || res >= last_res) break;
      ++polished;
    }
    last_res = res;

    const SymTridiag h = fn.hessian(st.f);
    std::vector<double> d;
    double lam = lambda > 0.0 ? lambda * 0.1 : 0.0;
    if (lam < 1e-6) lam = 0.0;
    for (;;) {
      SymTridiag a = h;
      for (int i = 0; i < n; ++i) a.diag[i] += 2.0 * lam * fn.mass[i];
      d.assign(g.begin(), g.end());
      for (auto& v : d) v = -v;
      if (solve_spd_tridiag(a, 0.0, d)) break;
      lam = lam == 0.0 ? 1e-4 : lam * 10.0;
      if (lam > 1e14) break;
    }
    lambda = lam;

    std::vector<double> fnew(n);
    double enew = st.energy;
    bool accepted = false;
    const bool tiny = max_abs(d) <= 1e-8 * std::max(1.0, max_abs(st.f));
    for (double s = 1.0; s >= 1e-10; s *= 0.5) {
      for (int i = 0; i < n; ++i) fnew[i] = std::max(0.0, st.f[i] + s * d[i]);
      enew = fn.energy(fnew);
      double lin = 0.0;
      for (int i = 0; i < n; ++i) lin += g[i] * (fnew[i] - st.f[i]);
      if (tiny || enew <= st.energy + 1e-4 * lin) {
        accepted = true;
        break;
      }
      const bool flat = std::abs(enew - st.energy) <=
                        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(st.energy));
      if (s == 1.0 && flat && fn.residual(fnew) < res) {
        accepted = true;
        break;
      }
    }
    ++st.iterations;
    if (accepted) {
      st.f = fnew;
      st.energy = enew;
      st.trace.push_back(enew);
      continue;
    }
    if (bb_budget <= 0) break;
    const int before = st.iterations;
    bb_steps(fn, st, tol, std::min(bb_budget, 500));
    bb_budget -= st.iterations - before;
    lambda = 0.0;
  }
  st.residual = fn.residual(st.f);
  st.tolerance = tol;
  st.converged = st.residual <= tol;
  return st;
}

}  // namespace surfsc
