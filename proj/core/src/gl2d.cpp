#include "surfsc/gl2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <memory>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/Polynomials>

#include "surfsc/errors.hpp"
#include "surfsc/functional1d.hpp"

namespace surfsc {

namespace {

constexpr double kPi = std::numbers::pi;

// Four-point Lagrange interpolation on arbitrary nodes x[lo..lo+3].
double lagrange4(const double* x, const double* y, double t) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int c = 0; c < 4; ++c)
      if (c != a) l *= (t - x[c]) / (x[a] - x[c]);
    s += l * y[a];
  }
  return s;
}

cplx lagrange4(const double* x, const cplx* y, double t) {
  cplx s = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int c = 0; c < 4; ++c)
      if (c != a) l *= (t - x[c]) / (x[a] - x[c]);
    s += l * y[a];
  }
  return s;
}

int stencil_start(int i, int n) { return std::clamp(i - 1, 0, n - 4); }

// Profile value at depth t, zero beyond the profile interval.
double profile_at(const Profile1D& p, double t) {
  const int n = static_cast<int>(p.f.size());
  if (t > p.t.back()) return 0.0;
  const int i = std::min(static_cast<int>(t / p.h), n - 2);
  const int s = stencil_start(i, n);
  return std::max(0.0, lagrange4(&p.t[s], &p.f[s], t));
}

double inv_eps2(const DiscGrid& g) { return 1.0 / (g.eps * g.eps); }

double rdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return s;
}

double rdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Link phase factors for the current link variables.
struct Links {
  std::vector<cplx> ur, uth;
};

Links link_factors(const DiscField& f) {
  const double s = inv_eps2(f.grid);
  Links l;
  l.ur.resize(f.a_r.size());
  l.uth.resize(f.a_th.size());
  for (std::size_t k = 0; k < f.a_r.size(); ++k) l.ur[k] = std::polar(1.0, f.a_r[k] * s);
  for (std::size_t k = 0; k < f.a_th.size(); ++k) l.uth[k] = std::polar(1.0, f.a_th[k] * s);
  return l;
}

double field_energy(const DiscField& f) {
  if (f.mode == GaugeMode::fixed) return 0.0;
  const auto& g = f.grid;
  const double coef = f.b * inv_eps2(g) * inv_eps2(g);
  double e = 0.0;
  for (int i = 0; i + 1 < g.n_r; ++i) {
    const double A = 0.5 * (g.r[i + 1] * g.r[i + 1] - g.r[i] * g.r[i]) * g.dtheta;
    for (int j = 0; j < g.n_theta; ++j) {
      const int jp = (j + 1) % g.n_theta;
      const double C = f.a_r[g.idx(i, j)] + f.a_th[g.idx(i + 1, j)] - f.a_r[g.idx(i, jp)] -
                       f.a_th[g.idx(i, j)];
      e += (C - A) * (C - A) / A;
    }
  }
  const double A0 = kPi * g.r[0] * g.r[0];
  double flux = 0.0;
  for (int j = 0; j < g.n_theta; ++j) flux += f.a_th[g.idx(0, j)];
  e += (flux - A0) * (flux - A0) / A0;
  return coef * e;
}

// Diagonal preconditioner for psi.
std::vector<double> psi_precond(const DiscGrid& g) {
  std::vector<double> p(g.nodes());
  const double s = inv_eps2(g);
  for (int i = 0; i < g.n_r; ++i) {
    double c = 2.0 * g.c_th[i];
    if (i > 0) c += g.c_r[i - 1];
    if (i + 1 < g.n_r) c += g.c_r[i];
    const double v = 2.0 * c + 2.0 * g.area[i] * s;
    for (int j = 0; j < g.n_theta; ++j) p[g.idx(i, j)] = v;
  }
  return p;
}

// Coefficients of E(x + a d) as a quartic polynomial in a.
std::array<double, 5> quartic_coeffs(const DiscField& f, const Links& L, const std::vector<cplx>& d) {
  const auto& g = f.grid;
  const auto& x = f.psi;
  const double pc = inv_eps2(g) / (2.0 * f.b);
  std::array<double, 5> e{};
  e[0] = 0.0;
  double k0 = 0.0, k1 = 0.0, k2 = 0.0;
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.idx(i, j);
      const std::size_t bth = g.idx(i, (j + 1) % g.n_theta);
      const cplx u = L.uth[a];
      const cplx dx = x[bth] * u - x[a];
      const cplx dd = d[bth] * u - d[a];
      const double c = g.c_th[i];
      k0 += c * std::norm(dx);
      k1 += 2.0 * c * (dx.real() * dd.real() + dx.imag() * dd.imag());
      k2 += c * std::norm(dd);
      if (i + 1 < g.n_r) {
        const std::size_t br = g.idx(i + 1, j);
        const cplx ur = L.ur[a];
        const cplx rx = x[br] * ur - x[a];
        const cplx rd = d[br] * ur - d[a];
        const double cr = g.c_r[i];
        k0 += cr * std::norm(rx);
        k1 += 2.0 * cr * (rx.real() * rd.real() + rx.imag() * rd.imag());
        k2 += cr * std::norm(rd);
      }
      const double p = pc * g.area[i];
      const double A = std::norm(x[a]);
      const double B = 2.0 * (x[a].real() * d[a].real() + x[a].imag() * d[a].imag());
      const double C = std::norm(d[a]);
      e[0] += p * (A * A - 2.0 * A);
      e[1] += p * (2.0 * A * B - 2.0 * B);
      e[2] += p * (B * B + 2.0 * A * C - 2.0 * C);
      e[3] += p * 2.0 * B * C;
      e[4] += p * C * C;
    }
  }
  e[0] += k0 + field_energy(f);
  e[1] += k1;
  e[2] += k2;
  return e;
}

// E(x + a d) - E(x)
double poly_change(const std::array<double, 5>& e, double a) {
  return (((e[4] * a + e[3]) * a + e[2]) * a + e[1]) * a;
}

// Global minimiser over a > 0 of the quartic; 0 if none decreases the energy.
double quartic_step(const std::array<double, 5>& e) {
  Eigen::Matrix<double, 4, 1> c;
  c << e[1], 2.0 * e[2], 3.0 * e[3], 4.0 * e[4];
  double best = 0.0, best_val = 0.0;
  if (e[4] <= 0.0) {
    if (e[2] > 0.0) best = -e[1] / (2.0 * e[2]);
    return best > 0.0 ? best : 0.0;
  }
  Eigen::PolynomialSolver<double, 3> solver(c);
  for (const auto& z : solver.roots()) {
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z.real()))) continue;
    const double a = z.real();
    if (a <= 0.0) continue;
    const double v = poly_change(e, a);
    if (v < best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

double gradient_with(const DiscField& f, const Links& L, std::vector<cplx>& gp);

// Exact Hessian of the energy at the symmetric state f(r) exp(-i n theta), block diagonal in the
// angular Fourier modes (m, -m) and tridiagonal in r, used as a preconditioner.
class FourierPrecond {
 public:
  bool build(const DiscField& field, long n, const std::vector<double>& f, double shift) {
    const auto& g = field.grid;
    nt_ = g.n_theta;
    N_ = g.n_r - 1;
    n_ = n;
    dtheta_ = g.dtheta;
    const double s = inv_eps2(g);
    const double pc = s / (2.0 * field.b);
    inv_.assign(static_cast<std::size_t>(nt_ / 2 + 1) * N_, Eigen::Matrix2d::Zero());
    off_.assign(N_, 0.0);
    std::vector<double> base(N_), kin(N_), coup(N_), phi(N_);
    for (int k = 0; k < N_; ++k) {
      const int i = k + 1;
      const double p = pc * g.area[i];
      double rad = g.c_r[i - 1];
      if (i + 1 < g.n_r) rad += g.c_r[i];
      base[k] = 2.0 * rad + 4.0 * p * (2.0 * f[i] * f[i] - 1.0) + shift * 2.0 * g.area[i] * s;
      kin[k] = 2.0 * g.c_th[i];
      coup[k] = 4.0 * p * f[i] * f[i];
      phi[k] = (0.5 * g.r[i] * g.r[i] * s - static_cast<double>(n)) * g.dtheta;
      if (k + 1 < N_) off_[k] = -2.0 * g.c_r[i];
    }
    for (int m = 0; m <= nt_ / 2; ++m) {
      const double w = m * dtheta_;
      Eigen::Matrix2d prev_inv = Eigen::Matrix2d::Zero();
      for (int k = 0; k < N_; ++k) {
        const double sp = std::sin(0.5 * (w + phi[k])), sm = std::sin(0.5 * (-w + phi[k]));
        Eigen::Matrix2d D;
        D << base[k] + kin[k] * 4.0 * sp * sp, coup[k], coup[k], base[k] + kin[k] * 4.0 * sm * sm;
        if (k > 0) D -= off_[k - 1] * off_[k - 1] * prev_inv;
        if (!(D(0, 0) > 0.0) || !(D.determinant() > 0.0)) return false;
        prev_inv = D.inverse();
        inv_[static_cast<std::size_t>(m) * N_ + k] = prev_inv;
      }
    }
    return true;
  }

  void apply(const std::vector<cplx>& gv, std::vector<cplx>& z) const {
    std::vector<cplx> row(nt_), spec(nt_);
    std::vector<cplx> hat(static_cast<std::size_t>(N_) * nt_);
    for (int k = 0; k < N_; ++k) {
      const std::size_t off = static_cast<std::size_t>(k + 1) * nt_;
      for (int j = 0; j < nt_; ++j) row[j] = gv[off + j] * std::polar(1.0, static_cast<double>(n_) * j * dtheta_);
      fft_.fwd(spec, row);
      std::copy(spec.begin(), spec.end(), hat.begin() + static_cast<std::ptrdiff_t>(k) * nt_);
    }
    std::vector<Eigen::Vector2cd> y(N_);
    for (int m = 0; m <= nt_ / 2; ++m) {
      const int pm = (nt_ - m) % nt_;
      const Eigen::Matrix2d* S = &inv_[static_cast<std::size_t>(m) * N_];
      for (int k = 0; k < N_; ++k) {
        Eigen::Vector2cd r(hat[static_cast<std::size_t>(k) * nt_ + m],
                           std::conj(hat[static_cast<std::size_t>(k) * nt_ + pm]));
        if (k > 0) r -= off_[k - 1] * (S[k - 1].cast<cplx>() * y[k - 1]);
        y[k] = r;
      }
      for (int k = N_ - 1; k >= 0; --k) {
        Eigen::Vector2cd r = y[k];
        if (k + 1 < N_) r -= off_[k] * y[k + 1];
        y[k] = S[k].cast<cplx>() * r;
      }
      for (int k = 0; k < N_; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * nt_;
        if (pm == m) {
          hat[base + m] = 0.5 * (y[k](0) + std::conj(y[k](1)));
        } else {
          hat[base + m] = y[k](0);
          hat[base + pm] = std::conj(y[k](1));
        }
      }
    }
    z.assign(gv.size(), cplx(0.0, 0.0));
    for (int k = 0; k < N_; ++k) {
      std::copy_n(hat.begin() + static_cast<std::ptrdiff_t>(k) * nt_, nt_, spec.begin());
      fft_.inv(row, spec);
      const std::size_t off = static_cast<std::size_t>(k + 1) * nt_;
      for (int j = 0; j < nt_; ++j) z[off + j] = row[j] * std::polar(1.0, -static_cast<double>(n_) * j * dtheta_);
    }
  }

 private:
  int nt_ = 0, N_ = 0;
  long n_ = 0;
  double dtheta_ = 0.0;
  std::vector<Eigen::Matrix2d> inv_;
  std::vector<double> off_;
  mutable Eigen::FFT<double> fft_;
};

// Winding of psi on the boundary ring, if |psi| stays away from zero there.
bool boundary_winding(const DiscField& f, long& n) {
  const auto& g = f.grid;
  const int i = g.n_r - 1;
  double sum = 0.0, mn = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n_theta; ++j) {
    const cplx a = f.psi[g.idx(i, j)], b = f.psi[g.idx(i, (j + 1) % g.n_theta)];
    mn = std::min(mn, std::abs(a));
    sum += std::arg(std::conj(a) * b);
  }
  if (!(mn > 1e-3)) return false;
  n = -std::lround(sum / (2.0 * kPi));
  return true;
}

std::unique_ptr<FourierPrecond> make_fourier_precond(const DiscField& f) {
  long n = 0;
  if (!boundary_winding(f, n)) return nullptr;
  const auto& g = f.grid;
  std::vector<double> mean(g.n_r, 0.0);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_theta; ++j) mean[i] += std::abs(f.psi[g.idx(i, j)]);
    mean[i] /= g.n_theta;
  }
  RadialReduction base;
  try {
    base = radial_state(g, f.b, static_cast<double>(n), &mean);
  } catch (const Error&) {
    return nullptr;
  }
  auto pc = std::make_unique<FourierPrecond>();
  for (double shift : {1e-3, 1e-2, 1e-1})
    if (pc->build(f, n, base.f, shift)) return pc;
  return nullptr;
}

// Preconditioned Polak-Ribiere conjugate gradient on psi with the links frozen.
struct PsiSolve {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

PsiSolve solve_psi(DiscField& f, const GLOptions& opt, int max_iter, std::vector<double>& trace) {
  const auto& g = f.grid;
  const Links L = link_factors(f);
  const auto P = psi_precond(g);
  std::vector<cplx> grad(g.nodes()), z(g.nodes()), d(g.nodes());
  double e = gradient_with(f, L, grad);
  PsiSolve out;
  const auto fp = make_fourier_precond(f);
  auto precond = [&](const std::vector<cplx>& gg, std::vector<cplx>& zz) {
    if (fp) {
      fp->apply(gg, zz);
      return;
    }
    for (std::size_t k = 0; k < gg.size(); ++k) zz[k] = gg[k] / P[k];
  };
  precond(grad, z);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
  double gz = rdot(grad, z);
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    out.residual = psi_residual(f, grad);
    if (out.residual <= opt.tol) {
      out.converged = true;
      break;
    }
    const auto coeffs = quartic_coeffs(f, L, d);
    double a = quartic_step(coeffs);
    if (!(a > 0.0)) {
      if (++stall > 3) break;
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
      continue;
    }
    stall = 0;
    for (std::size_t k = 0; k < d.size(); ++k) f.psi[k] += a * d[k];
    std::vector<cplx> z_old = z;
    e = gradient_with(f, L, grad);
    precond(grad, z);
    const double gz_new = rdot(grad, z);
    double beta = 0.0;
    if ((it + 1) % opt.restart != 0) {
      double num = gz_new;
      for (std::size_t k = 0; k < z.size(); ++k)
        num -= grad[k].real() * z_old[k].real() + grad[k].imag() * z_old[k].imag();
      beta = std::max(0.0, num / gz);
    }
    gz = gz_new;
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k] + beta * d[k];
    if (rdot(grad, d) >= 0.0)
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
    ++out.iterations;
    if (out.iterations % 50 == 0) trace.push_back(e);
  }
  f.energy = e;
  f.residual = out.residual;
  return out;
}

std::vector<double> link_precond(const DiscField& f) {
  const auto& g = f.grid;
  const double s = inv_eps2(g);
  const double fc = 2.0 * f.b * s * s;
  std::vector<double> pr(f.a_r.size(), 0.0), pth(f.a_th.size(), 0.0);
  for (int i = 0; i + 1 < g.n_r; ++i) {
    const double A = 0.5 * (g.r[i + 1] * g.r[i + 1] - g.r[i] * g.r[i]) * g.dtheta;
    for (int j = 0; j < g.n_theta; ++j) {
      const int jp = (j + 1) % g.n_theta;
      pr[g.idx(i, j)] += fc / A;
      pr[g.idx(i, jp)] += fc / A;
      pth[g.idx(i + 1, j)] += fc / A;
      pth[g.idx(i, j)] += fc / A;
    }
  }
  for (int j = 0; j < g.n_theta; ++j) pth[g.idx(0, j)] += fc / (kPi * g.r[0] * g.r[0]);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.idx(i, j);
      const double m = std::abs(f.psi[a]);
      pth[a] += 2.0 * g.c_th[i] * s * s * m * std::abs(f.psi[g.idx(i, (j + 1) % g.n_theta)]);
      if (i + 1 < g.n_r) pr[a] += 2.0 * g.c_r[i] * s * s * m * std::abs(f.psi[g.idx(i + 1, j)]);
    }
  pr.insert(pr.end(), pth.begin(), pth.end());
  return pr;
}

// Preconditioned gradient descent with backtracking on the link variables, psi frozen.
double solve_links(DiscField& f, int max_iter, double tol) {
  const auto& g = f.grid;
  const std::size_t nr = f.a_r.size();
  const double s = inv_eps2(g);
  std::vector<double> gr, gth, grad, z, d;
  auto pack = [&]() {
    grad = gr;
    grad.insert(grad.end(), gth.begin(), gth.end());
  };
  auto apply = [&](const std::vector<double>& x0r, const std::vector<double>& x0t, double a) {
    for (std::size_t k = 0; k < nr; ++k) f.a_r[k] = x0r[k] + a * d[k];
    for (std::size_t k = 0; k < f.a_th.size(); ++k) f.a_th[k] = x0t[k] + a * d[nr + k];
  };
  double e = disc_gradient_links(f, gr, gth);
  pack();
  auto P = link_precond(f);
  double res = 0.0;
  std::vector<double> z_old;
  double gz = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    z.resize(grad.size());
    res = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      z[k] = grad[k] / P[k];
      res = std::max(res, std::abs(z[k]) * s);
    }
    if (res <= tol) break;
    const double gz_new = rdot(grad, z);
    double beta = 0.0;
    if (it % 50 != 0 && !z_old.empty()) beta = std::max(0.0, (gz_new - rdot(grad, z_old)) / gz);
    if (d.empty() || beta == 0.0) d.assign(z.size(), 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k] + beta * d[k];
    double slope = rdot(grad, d);
    if (slope >= 0.0) {
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
      slope = -gz_new;
    }
    z_old = z;
    gz = gz_new;
    const auto x0r = f.a_r, x0t = f.a_th;
    double a = 1.0;
    double e_new = e;
    for (int bt = 0; bt < 40; ++bt, a *= 0.5) {
      apply(x0r, x0t, a);
      e_new = disc_energy(f);
      if (e_new <= e + 1e-4 * a * slope) break;
    }
    if (!(e_new <= e)) {
      f.a_r = x0r;
      f.a_th = x0t;
      break;
    }
    e = disc_gradient_links(f, gr, gth);
    pack();
  }
  return res;
}

}  // namespace

DiscGrid DiscGrid::make(const DiscGridConfig& cfg) {
  if (!(cfg.R > 0.0) || !(cfg.eps > 0.0)) throw Error(ErrorKind::domain, "disc needs R > 0, eps > 0");
  if (!(cfg.dt0 > 0.0) || !(cfg.ds > 0.0) || !(cfg.depth_cap > 0.0))
    throw Error(ErrorKind::domain, "grid steps and depth must be positive");
  if (cfg.n_r == 0 && !(cfg.growth > 1.0)) throw Error(ErrorKind::domain, "radial growth must exceed 1");
  const double depth = std::min(cfg.depth_cap, 0.75 * cfg.R / cfg.eps);
  double q = cfg.growth;
  int cells = 0;
  if (cfg.n_r > 0) {
    cells = cfg.n_r - 1;
    if (cells < 4) throw Error(ErrorKind::shape, "need at least 5 radial nodes");
    auto total = [&](double qq) {
      return std::abs(qq - 1.0) < 1e-12 ? cfg.dt0 * cells
                                         : cfg.dt0 * (std::pow(qq, cells) - 1.0) / (qq - 1.0);
    };
    auto fn = [&](double qq) { return total(qq) - depth; };
    if (fn(0.5) > 0.0 || fn(2.0) < 0.0)
      throw Error(ErrorKind::domain, "radial node count incompatible with first step");
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::bisect(fn, 0.5, 2.0, tol, iters);
    q = 0.5 * (br.first + br.second);
  } else {
    cells = static_cast<int>(std::ceil(std::log1p(depth * (q - 1.0) / cfg.dt0) / std::log(q)));
  }
  std::vector<double> dt(cells);
  double sum = 0.0;
  for (int k = 0; k < cells; ++k) sum += (dt[k] = cfg.dt0 * std::pow(q, k));
  for (auto& v : dt) v *= depth / sum;
  DiscGrid g;
  g.R = cfg.R;
  g.eps = cfg.eps;
  g.n_r = cells + 1;
  g.n_theta = cfg.n_theta > 0 ? cfg.n_theta
                              : static_cast<int>(std::lround(2.0 * kPi * cfg.R / (cfg.eps * cfg.ds)));
  if (g.n_theta < 8) throw Error(ErrorKind::shape, "need at least 8 angular nodes");
  g.dtheta = 2.0 * kPi / g.n_theta;
  g.r.assign(g.n_r, cfg.R);
  double t = 0.0;
  for (int k = 0; k < cells; ++k) {
    t += dt[k];
    g.r[g.n_r - 2 - k] = cfg.R - cfg.eps * t;
  }
  g.r.front() = cfg.R - cfg.eps * depth;
  g.dual.assign(g.n_r, 0.0);
  g.c_r.assign(g.n_r - 1, 0.0);
  for (int i = 0; i + 1 < g.n_r; ++i) {
    const double dr = g.r[i + 1] - g.r[i];
    g.dual[i] += 0.5 * dr;
    g.dual[i + 1] += 0.5 * dr;
    g.c_r[i] = 0.5 * (g.r[i] + g.r[i + 1]) * g.dtheta / dr;
  }
  g.c_th.resize(g.n_r);
  g.area.resize(g.n_r);
  for (int i = 0; i < g.n_r; ++i) {
    g.c_th[i] = g.dual[i] / (g.r[i] * g.dtheta);
    g.area[i] = g.r[i] * g.dual[i] * g.dtheta;
  }
  return g;
}

int DiscGrid::nodes_within(double distance) const {
  return static_cast<int>(std::count_if(r.begin(), r.end(), [&](double x) {
    return R - x <= distance * (1.0 + 1e-12);
  }));
}

DiscField::DiscField(const DiscGrid& g, double b_)
    : grid(g), b(b_), psi(g.nodes()), a_r(static_cast<std::size_t>(g.n_r - 1) * g.n_theta),
      a_th(g.nodes()) {
  set_symmetric_gauge(*this);
}

void set_symmetric_gauge(DiscField& f) {
  const auto& g = f.grid;
  std::fill(f.a_r.begin(), f.a_r.end(), 0.0);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) f.a_th[g.idx(i, j)] = 0.5 * g.r[i] * g.r[i] * g.dtheta;
}

EnergyParts disc_energy_parts(const DiscField& f) {
  const auto& g = f.grid;
  const Links L = link_factors(f);
  const double pc = inv_eps2(g) / (2.0 * f.b);
  EnergyParts e;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.idx(i, j);
      e.kinetic += g.c_th[i] * std::norm(f.psi[g.idx(i, (j + 1) % g.n_theta)] * L.uth[a] - f.psi[a]);
      if (i + 1 < g.n_r) e.kinetic += g.c_r[i] * std::norm(f.psi[g.idx(i + 1, j)] * L.ur[a] - f.psi[a]);
      const double m = std::norm(f.psi[a]);
      e.potential += pc * g.area[i] * (m * m - 2.0 * m);
    }
  e.field = field_energy(f);
  return e;
}

double disc_energy(const DiscField& f) { return disc_energy_parts(f).total(); }

namespace {

double gradient_with(const DiscField& f, const Links& L, std::vector<cplx>& gp) {
  const auto& g = f.grid;
  const double pc = inv_eps2(g) / (2.0 * f.b);
  gp.assign(g.nodes(), cplx(0.0, 0.0));
  double e = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.idx(i, j);
      const std::size_t bt = g.idx(i, (j + 1) % g.n_theta);
      const cplx D = f.psi[bt] * L.uth[a] - f.psi[a];
      e += g.c_th[i] * std::norm(D);
      gp[bt] += 2.0 * g.c_th[i] * D * std::conj(L.uth[a]);
      gp[a] -= 2.0 * g.c_th[i] * D;
      if (i + 1 < g.n_r) {
        const std::size_t br = g.idx(i + 1, j);
        const cplx Dr = f.psi[br] * L.ur[a] - f.psi[a];
        e += g.c_r[i] * std::norm(Dr);
        gp[br] += 2.0 * g.c_r[i] * Dr * std::conj(L.ur[a]);
        gp[a] -= 2.0 * g.c_r[i] * Dr;
      }
      const double p = pc * g.area[i];
      const double m = std::norm(f.psi[a]);
      e += p * (m * m - 2.0 * m);
      gp[a] += 4.0 * p * (m - 1.0) * f.psi[a];
    }
  for (int j = 0; j < g.n_theta; ++j) gp[g.idx(0, j)] = 0.0;
  return e + field_energy(f);
}

}  // namespace

double disc_gradient(const DiscField& f, std::vector<cplx>& gp) {
  return gradient_with(f, link_factors(f), gp);
}

double disc_gradient_links(const DiscField& f, std::vector<double>& gr, std::vector<double>& gth) {
  const auto& g = f.grid;
  const Links L = link_factors(f);
  const double s = inv_eps2(g);
  gr.assign(f.a_r.size(), 0.0);
  gth.assign(f.a_th.size(), 0.0);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const std::size_t a = g.idx(i, j);
      const cplx pa = std::conj(f.psi[a]);
      gth[a] += 2.0 * g.c_th[i] * s * std::imag(pa * f.psi[g.idx(i, (j + 1) % g.n_theta)] * L.uth[a]);
      if (i + 1 < g.n_r) gr[a] += 2.0 * g.c_r[i] * s * std::imag(pa * f.psi[g.idx(i + 1, j)] * L.ur[a]);
    }
  if (f.mode == GaugeMode::coupled) {
    const double coef = 2.0 * f.b * s * s;
    for (int i = 0; i + 1 < g.n_r; ++i) {
      const double A = 0.5 * (g.r[i + 1] * g.r[i + 1] - g.r[i] * g.r[i]) * g.dtheta;
      for (int j = 0; j < g.n_theta; ++j) {
        const int jp = (j + 1) % g.n_theta;
        const double C = f.a_r[g.idx(i, j)] + f.a_th[g.idx(i + 1, j)] - f.a_r[g.idx(i, jp)] -
                         f.a_th[g.idx(i, j)];
        const double k = coef * (C - A) / A;
        gr[g.idx(i, j)] += k;
        gth[g.idx(i + 1, j)] += k;
        gr[g.idx(i, jp)] -= k;
        gth[g.idx(i, j)] -= k;
      }
    }
    const double A0 = kPi * g.r[0] * g.r[0];
    double flux = 0.0;
    for (int j = 0; j < g.n_theta; ++j) flux += f.a_th[g.idx(0, j)];
    for (int j = 0; j < g.n_theta; ++j) gth[g.idx(0, j)] += coef * (flux - A0) / A0;
  }
  return disc_energy(f);
}

double psi_residual(const DiscField& f, const std::vector<cplx>& gp) {
  const auto& g = f.grid;
  const double s = inv_eps2(g);
  double r = 0.0;
  for (int i = 1; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j)
      r = std::max(r, std::abs(gp[g.idx(i, j)]) / (2.0 * g.area[i] * s));
  return r;
}

long trial_winding(double R, double eps, double alpha_k) {
  return static_cast<long>(std::floor(R * R / (2.0 * eps * eps) + R * alpha_k / eps));
}

std::vector<double> profile_on_grid(const OptimalProfile& opt, const DiscGrid& grid) {
  const auto& p = opt.profile;
  if (p.params.eps != grid.eps || std::abs(p.params.k * grid.R - 1.0) > 1e-12)
    throw Error(ErrorKind::precondition, "profile parameters do not match the disc (k = 1/R, eps)");
  std::vector<double> f(grid.n_r);
  for (int i = 0; i < grid.n_r; ++i) f[i] = profile_at(p, (grid.R - grid.r[i]) / grid.eps);
  return f;
}

DiscField build_trial(const OptimalProfile& opt, const DiscGrid& grid, long n) {
  const auto fr = profile_on_grid(opt, grid);
  DiscField f(grid, opt.profile.params.b);
  for (int i = 1; i < grid.n_r; ++i)
    for (int j = 0; j < grid.n_theta; ++j)
      f.psi[grid.idx(i, j)] = fr[i] * std::polar(1.0, -static_cast<double>(n) * j * grid.dtheta);
  f.energy = disc_energy(f);
  return f;
}

DiscField build_trial(const OptimalProfile& opt, const DiscGrid& grid) {
  return build_trial(opt, grid, trial_winding(grid.R, grid.eps, opt.alpha_k));
}

DiscField random_start(const OptimalProfile& opt, const DiscGrid& grid, std::uint64_t seed) {
  const auto fr = profile_on_grid(opt, grid);
  DiscField f(grid, opt.profile.params.b);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-std::numbers::pi, std::numbers::pi);
  for (int i = 1; i < grid.n_r; ++i)
    for (int j = 0; j < grid.n_theta; ++j) f.psi[grid.idx(i, j)] = std::polar(fr[i], U(rng));
  f.energy = disc_energy(f);
  return f;
}

GLResult minimize_gl_from(DiscField start, const GLOptions& opt) {
  if (!in_surface_regime(start.b)) throw Error(ErrorKind::regime, "disc solver needs 1 < b < 1/Theta0");
  GLResult out;
  start.mode = opt.mode;
  out.field = std::move(start);
  DiscField& f = out.field;
  if (opt.mode == GaugeMode::fixed) {
    const auto s = solve_psi(f, opt, opt.max_iter, out.trace);
    f.iterations = s.iterations;
    out.converged = s.converged;
  } else {
    double e_prev = disc_energy(f);
    for (int outer = 0; outer < opt.outer_max; ++outer) {
      const auto s = solve_psi(f, opt, std::max(1, opt.max_iter / opt.outer_max), out.trace);
      f.iterations += s.iterations;
      const double link_res = solve_links(f, 200, opt.tol);
      std::vector<cplx> gp;
      const double e = disc_gradient(f, gp);
      f.residual = psi_residual(f, gp);
      f.energy = e;
      out.trace.push_back(e);
      if (f.residual <= opt.tol && link_res <= opt.tol) {
        out.converged = true;
        break;
      }
      if (std::abs(e_prev - e) <= 1e-15 * std::abs(e) && s.iterations == 0) break;
      e_prev = e;
    }
  }
  f.energy = disc_energy(f);
  return out;
}

GLStarts minimize_gl(const OptimalProfile& opt, const DiscGrid& grid, const GLOptions& options) {
  if (opt.trivial) throw Error(ErrorKind::precondition, "trivial profile: no surface state to start from");
  const double nr = grid.R * grid.R / (2.0 * grid.eps * grid.eps) + grid.R * opt.alpha_k / grid.eps;
  std::vector<long> ns{static_cast<long>(std::floor(nr))};
  if (std::ceil(nr) != std::floor(nr)) ns.push_back(static_cast<long>(std::ceil(nr)));
  GLStarts out;
  for (long n : ns) {
    DiscField start = build_trial(opt, grid, n);
    std::mt19937_64 rng(options.seed * 1000003ULL + static_cast<std::uint64_t>(n));
    std::normal_distribution<double> N;
    for (int i = 1; i < grid.n_r; ++i)
      for (int j = 0; j < grid.n_theta; ++j)
        start.psi[grid.idx(i, j)] *= cplx(1.0 + options.noise * N(rng), options.noise * N(rng));
    GLResult r = minimize_gl_from(std::move(start), options);
    r.start_winding = n;
    out.runs.push_back(std::move(r));
  }
  for (int k = 1; k < static_cast<int>(out.runs.size()); ++k)
    if (out.runs[k].field.energy < out.runs[out.best].field.energy) out.best = k;
  return out;
}

Functional1D radial_functional(const DiscGrid& g, double b, double n) {
  const int m = g.n_r - 1;
  const double nt = g.n_theta;
  const double s = inv_eps2(g);
  Functional1D fn;
  fn.b = b;
  fn.link.resize(m - 1);
  fn.mass.resize(m);
  fn.pot.resize(m);
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    fn.mass[k] = nt * g.area[i] * s;
    const double phi = (0.5 * g.r[i] * g.r[i] * s - n) * g.dtheta;
    const double sn = std::sin(0.5 * phi);
    fn.pot[k] = nt * g.c_th[i] * 4.0 * sn * sn;
    if (k + 1 < m) fn.link[k] = nt * g.c_r[i];
  }
  fn.pot[0] += nt * g.c_r[0];
  return fn;
}

RadialReduction radial_state(const DiscGrid& g, double b, double n, const std::vector<double>* init) {
  const auto fn = radial_functional(g, b, n);
  std::vector<double> x0(g.n_r - 1);
  for (int k = 0; k < g.n_r - 1; ++k) {
    const double t = (g.R - g.r[k + 1]) / g.eps;
    x0[k] = init ? (*init)[k + 1] : 0.8 * std::exp(-0.5 * (t - 0.8) * (t - 0.8));
  }
  MinimizeOptions mo;
  mo.grad_tol = 1e-11;
  const auto res = minimize_functional(fn, x0, mo);
  if (!res.converged) throw SolverFailure("radial reduction did not converge", res.residual);
  RadialReduction r;
  r.n = n;
  r.alpha = (n - g.R * g.R / (2.0 * g.eps * g.eps)) * g.eps / g.R;
  r.energy = res.energy;
  r.e_density = res.energy * g.eps / (2.0 * kPi * g.R);
  r.f.assign(1, 0.0);
  r.f.insert(r.f.end(), res.f.begin(), res.f.end());
  return r;
}

RadialReduction radial_reduction(const DiscGrid& g, double b, const OptimalProfile& opt) {
  const double base = g.R * g.R / (2.0 * g.eps * g.eps);
  const double scale = g.R / g.eps;
  std::vector<double> warm = profile_on_grid(opt, g);
  auto eval = [&](double alpha) {
    auto r = radial_state(g, b, base + scale * alpha, &warm);
    if (*std::max_element(r.f.begin(), r.f.end()) > 1e-6) warm = r.f;
    return r;
  };
  std::uintmax_t iters = 200;
  const auto best = boost::math::tools::brent_find_minima(
      [&](double a) { return eval(a).energy; }, opt.alpha_k - 0.2, opt.alpha_k + 0.2, 40, iters);
  return eval(best.first);
}

double GammaRule::value(double eps) const {
  return C * std::pow(eps, q) * std::pow(std::abs(std::log(eps)), p);
}

bool GammaRule::admissible() const {
  return C > 0.0 && (q < 1.0 / 6.0 || (q == 1.0 / 6.0 && p > 4.0 / 3.0));
}

DensityReport density_checks(const DiscField& f, const std::vector<double>& fr, const GammaRule& rule) {
  const auto& g = f.grid;
  if (static_cast<int>(fr.size()) != g.n_r) throw Error(ErrorKind::shape, "reference profile size");
  if (!rule.admissible())
    throw Error(ErrorKind::precondition, "gamma_eps must dominate eps^(1/6) |log eps|^(4/3)");
  DensityReport d;
  d.gamma = rule.value(g.eps);
  double l2 = 0.0;
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) {
      const double m = std::abs(f.psi[g.idx(i, j)]);
      const double diff = m * m - fr[i] * fr[i];
      l2 += g.area[i] * diff * diff;
      if (fr[i] >= d.gamma) {
        d.linf_layer_err = std::max(d.linf_layer_err, std::abs(m - fr[i]));
        if (j == 0) ++d.layer_nodes;
      }
      if (i == g.n_r - 1) d.linf_boundary_err = std::max(d.linf_boundary_err, std::abs(m - fr[i]));
    }
  d.l2_err = std::sqrt(l2);
  return d;
}

WindingReport winding_number(const DiscField& f, double contour_r, double alpha_k, double threshold) {
  const auto& g = f.grid;
  if (contour_r < g.r.front() || contour_r > g.R)
    throw Error(ErrorKind::shape, "contour outside the grid");
  int i = 0;
  while (i + 2 < g.n_r && g.r[i + 1] < contour_r) ++i;
  const double w = (contour_r - g.r[i]) / (g.r[i + 1] - g.r[i]);
  std::vector<cplx> v(g.n_theta);
  WindingReport rep;
  rep.contour_r = contour_r;
  rep.min_modulus = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n_theta; ++j) {
    v[j] = (1.0 - w) * f.psi[g.idx(i, j)] + w * f.psi[g.idx(i + 1, j)];
    rep.min_modulus = std::min(rep.min_modulus, std::abs(v[j]));
  }
  if (!(rep.min_modulus >= threshold))
    throw Error(ErrorKind::precondition, "degree undefined: |Psi| falls below the threshold on the contour");
  double sum = 0.0;
  for (int j = 0; j < g.n_theta; ++j) sum += std::arg(std::conj(v[j]) * v[(j + 1) % g.n_theta]);
  rep.degree = std::lround(sum / (2.0 * kPi));
  const double e2 = g.eps * g.eps;
  const double a = std::abs(alpha_k) / g.eps;
  rep.predicted = g.R * g.R / (2.0 * e2) + a;
  rep.predicted_literal = kPi * g.R * g.R / e2 + a;
  rep.predicted_physical = g.R * g.R / (2.0 * e2) - g.R * a;
  rep.gap = std::abs(std::abs(static_cast<double>(rep.degree)) - rep.predicted);
  return rep;
}

double gamma0(const DiscField& f) {
  const auto& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.n_theta; ++j) s += f.a_th[g.idx(g.n_r - 1, j)];
  return s / (2.0 * kPi * g.R);
}

LayerField extract_layer_field(const DiscField& f, const OptimalProfile& opt) {
  const auto& g = f.grid;
  const auto& p = opt.profile;
  if (p.params.eps != g.eps || std::abs(p.params.k * g.R - 1.0) > 1e-12)
    throw Error(ErrorKind::precondition, "profile parameters do not match the disc");
  const double s = inv_eps2(g);
  const double g0 = gamma0(f);
  LayerParams lp;
  lp.k = 1.0 / g.R;
  lp.eps = g.eps;
  lp.b = f.b;
  lp.c0 = p.params.c0;
  lp.delta_eps = g0 * s - std::floor(g0 * s);
  LayerField out(lp, g.n_theta, static_cast<int>(p.f.size()));
  // gauge-fixed field: arc links along r = R and radial links vanish
  std::vector<cplx> G(g.nodes());
  double arc = 0.0;
  for (int j = 0; j < g.n_theta; ++j) {
    double chi = arc * s;
    for (int i = g.n_r - 1; i >= 0; --i) {
      if (i < g.n_r - 1) chi -= f.a_r[g.idx(i, j)] * s;
      G[g.idx(i, j)] = f.psi[g.idx(i, j)] * std::polar(1.0, chi);
    }
    arc += f.a_th[g.idx(g.n_r - 1, j)];
  }
  std::vector<double> xr(4);
  std::vector<cplx> yr(4);
  for (int it = 0; it < out.n_t; ++it) {
    const double r = g.R - g.eps * p.t[it];
    if (r < g.r.front()) continue;
    int i = 0;
    while (i + 2 < g.n_r && g.r[i + 1] < r) ++i;
    const int st = stencil_start(i, g.n_r);
    for (int j = 0; j < g.n_theta; ++j) {
      for (int a = 0; a < 4; ++a) {
        xr[a] = g.r[st + a];
        yr[a] = G[g.idx(st + a, j)];
      }
      out.at(it, j) = lagrange4(xr.data(), yr.data(), r) *
                      std::polar(1.0, -lp.delta_eps * g.R * j * g.dtheta);
    }
  }
  return out;
}

AgmonFit agmon_decay_fit(const DiscField& f, double t_lo, double t_hi) {
  const auto& g = f.grid;
  std::vector<double> x, y;
  for (int i = 0; i < g.n_r; ++i) {
    const double t = (g.R - g.r[i]) / g.eps;
    if (t < t_lo || t > t_hi) continue;
    double m = 0.0;
    for (int j = 0; j < g.n_theta; ++j) m += std::abs(f.psi[g.idx(i, j)]);
    m /= g.n_theta;
    if (!(m > 0.0)) return {};
    x.push_back(t);
    y.push_back(std::log(m));
  }
  AgmonFit fit;
  const int n = static_cast<int>(x.size());
  if (n < 3) return fit;
  double mx = 0.0, my = 0.0;
  for (int k = 0; k < n; ++k) mx += x[k] / n, my += y[k] / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.quality = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
  fit.ok = fit.rate > 0.0 && fit.quality >= 0.95;
  return fit;
}

}  // namespace surfsc
