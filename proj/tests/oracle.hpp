#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "surfsc/functional1d.hpp"

namespace oracle {

struct BBResult {
  std::vector<double> f;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Projected-gradient KKT residual in the mass metric.
inline double kkt_residual(const surfsc::Functional1D& fn, const std::vector<double>& f,
                           const std::vector<double>& g) {
  double r = 0.0;
  for (int i = 0; i < fn.size(); ++i) {
    const double gi = g[i] / (2.0 * fn.mass[i]);
    r = std::max(r, f[i] > 0.0 ? std::abs(gi) : std::max(0.0, -gi));
  }
  return r;
}

// Stiffness plus mass: sum link (df)^2 + sum mass f^2, used as the gradient metric.
struct Metric {
  std::vector<double> diag, off;

  explicit Metric(const surfsc::Functional1D& fn) : diag(fn.mass), off(fn.link.size()) {
    for (std::size_t i = 0; i < fn.link.size(); ++i) {
      diag[i] += fn.link[i];
      diag[i + 1] += fn.link[i];
      off[i] = -fn.link[i];
    }
  }
  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) y[i] += off[i - 1] * x[i - 1];
      if (i + 1 < x.size()) y[i] += off[i] * x[i + 1];
    }
    return y;
  }
  // Thomas algorithm.
  std::vector<double> solve(std::vector<double> r) const {
    const std::size_t n = r.size();
    std::vector<double> c(n);
    double d = diag[0];
    r[0] /= d;
    for (std::size_t i = 1; i < n; ++i) {
      c[i - 1] = off[i - 1] / d;
      d = diag[i] - off[i - 1] * c[i - 1];
      r[i] = (r[i] - off[i - 1] * r[i - 1]) / d;
    }
    for (std::size_t i = n - 1; i-- > 0;) r[i] -= c[i] * r[i + 1];
    return r;
  }
};

// Projected Barzilai-Borwein in the Sobolev metric with a nonmonotone Armijo test.
inline BBResult projected_bb(const surfsc::Functional1D& fn, std::vector<double> f, double tol,
                             int max_iter) {
  const int n = fn.size();
  const Metric P(fn);
  for (double& x : f) x = std::max(0.0, x);
  auto g = fn.gradient(f);
  double e = fn.energy(f);
  std::deque<double> hist{e};
  double step = 1e-2;
  double best = e;
  int since_best = 0;
  BBResult out;
  std::vector<double> f_new(n), s(n), dg(n);
  for (int it = 0; it < max_iter; ++it) {
    out.residual = kkt_residual(fn, f, g);
    out.iterations = it;
    if (out.residual <= tol || since_best > 100) break;
    std::vector<double> half(g);
    for (double& x : half) x *= 0.5;
    const auto z = P.solve(half);
    const double e_ref = *std::max_element(hist.begin(), hist.end());
    double a = step, e_new = 0.0;
    for (int k = 0; k < 60; ++k) {
      double dec = 0.0;
      for (int i = 0; i < n; ++i) {
        f_new[i] = std::max(0.0, f[i] - a * z[i]);
        dec += g[i] * (f_new[i] - f[i]);
      }
      e_new = fn.energy(f_new);
      if (e_new <= e_ref + 1e-4 * dec || dec == 0.0) break;
      a *= 0.5;
    }
    const auto g_new = fn.gradient(f_new);
    for (int i = 0; i < n; ++i) {
      s[i] = f_new[i] - f[i];
      dg[i] = 0.5 * (g_new[i] - g[i]);
    }
    const auto Ps = P.apply(s);
    double sPs = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      sPs += s[i] * Ps[i];
      sy += s[i] * dg[i];
    }
    step = sy > 0.0 ? std::clamp(sPs / sy, 1e-8, 1e8) : 1.0;
    f.swap(f_new);
    g = g_new;
    e = e_new;
    if (e < best) {
      best = e;
      since_best = 0;
    } else {
      ++since_best;
    }
    hist.push_back(e);
    if (hist.size() > 10) hist.pop_front();
  }
  out.f = std::move(f);
  out.energy = fn.energy(out.f);
  return out;
}

// Lowest of several restarts from random smooth bumps a exp(-(t - t0)^2 / w).
inline BBResult projected_bb_restarts(const surfsc::Functional1D& fn, const std::vector<double>& t,
                                      std::uint64_t seed, double tol, int max_iter, int restarts = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> A(0.2, 1.0), T0(0.0, 2.0), W(1.0, 4.0);
  BBResult best;
  for (int r = 0; r < restarts; ++r) {
    const double a = A(rng), t0 = T0(rng), w = W(rng);
    std::vector<double> init(fn.size());
    for (int i = 0; i < fn.size(); ++i) init[i] = a * std::exp(-(t[i] - t0) * (t[i] - t0) / w);
    auto res = projected_bb(fn, init, tol, max_iter);
    if (r == 0 || res.energy < best.energy) best = std::move(res);
  }
  return best;
}

// Dense generalised eigenproblem Q v = mu M v for the quadratic form of fn.
inline double dense_lowest(const surfsc::Functional1D& fn) {
  const int n = fn.size();
  const auto q = fn.quadratic_form();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double si = 1.0 / std::sqrt(fn.mass[i]);
    A(i, i) = q.diag[i] * si * si;
    if (i + 1 < n) {
      const double v = q.off[i] * si / std::sqrt(fn.mass[i + 1]);
      A(i, i + 1) = v;
      A(i + 1, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace oracle
