#include "surfsc/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "surfsc/errors.hpp"

namespace surfsc {

std::vector<double> SymTridiag::apply(const std::vector<double>& x) const {
  const int n = size();
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

double SymTridiag::max_row_sum() const {
  const int n = size();
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = std::abs(diag[i]);
    if (i > 0) s += std::abs(off[i - 1]);
    if (i + 1 < n) s += std::abs(off[i]);
    m = std::max(m, s);
  }
  return m;
}

bool solve_tridiag(const std::vector<double>& sub, const std::vector<double>& diag,
                   const std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return true;
  std::vector<double> c(n, 0.0);
  double beta = diag[0];
  if (beta == 0.0) return false;
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = sup[i - 1] / beta;
    beta = diag[i] - sub[i - 1] * c[i - 1];
    if (beta == 0.0) return false;
    rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return true;
}

bool solve_spd_tridiag(const SymTridiag& a, double sigma, std::vector<double>& rhs) {
  const int n = a.size();
  std::vector<double> d(n), l(n > 0 ? n - 1 : 0);
  d[0] = a.diag[0] - sigma;
  if (!(d[0] > 0.0)) return false;
  for (int i = 1; i < n; ++i) {
    l[i - 1] = a.off[i - 1] / d[i - 1];
    d[i] = a.diag[i] - sigma - l[i - 1] * a.off[i - 1];
    if (!(d[i] > 0.0)) return false;
  }
  for (int i = 1; i < n; ++i) rhs[i] -= l[i - 1] * rhs[i - 1];
  for (int i = 0; i < n; ++i) rhs[i] /= d[i];
  for (int i = n - 1; i-- > 0;) rhs[i] -= l[i] * rhs[i + 1];
  return true;
}

int sturm_count(const SymTridiag& a, double x) {
  const int n = a.size();
  int count = 0;
  double q = a.diag[0] - x;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    if (q == 0.0) q = std::numeric_limits<double>::epsilon() * (std::abs(a.off[i - 1]) + 1.0);
    q = a.diag[i] - x - a.off[i - 1] * a.off[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

double lowest_eigenvalue_bisect(const SymTridiag& a, double rel_tol) {
  const int n = a.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(a.off[i - 1]);
    if (i + 1 < n) r += std::abs(a.off[i]);
    lo = std::min(lo, a.diag[i] - r);
    hi = std::max(hi, a.diag[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > rel_tol * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(a, mid) >= 1) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

EigenPair lowest_eigenpair(const SymTridiag& a, double tol, int max_iter) {
  const int n = a.size();
  const double scale = std::max(1.0, a.max_row_sum());
  const double lambda0 = lowest_eigenvalue_bisect(a);
  EigenPair out;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double sigma = lambda0 - 1e-10 * scale;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> x = v;
    if (!solve_spd_tridiag(a, sigma, x)) {
      sigma -= 1e-8 * scale;
      continue;
    }
    const double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    for (auto& xi : x) xi /= nrm;
    const std::vector<double> ax = a.apply(x);
    const double mu = std::inner_product(x.begin(), x.end(), ax.begin(), 0.0);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(ax[i] - mu * x[i]));
    v = std::move(x);
    out.value = mu;
    out.residual = res / scale;
    out.iterations = it;
    if (out.residual <= tol) break;
  }
  if (!(out.residual <= tol)) throw SolverFailure("inverse iteration did not converge", out.residual);
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s < 0.0)
    for (auto& vi : v) vi = -vi;
  out.vector = std::move(v);
  return out;
}

}  // namespace surfsc
