#include "surfsc/layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "surfsc/costfn.hpp"
#include "surfsc/errors.hpp"

namespace surfsc {

double LayerParams::length() const { return 2.0 * std::numbers::pi * radius() / eps; }

double LayerParams::t_max() const { return interval_length(eps, c0); }

double delta_eps_for(double R, double eps) {
  const double x = R / (2.0 * eps * eps);
  const double near = std::round(x);
  if (std::abs(x - near) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) return 0.0;
  return x - std::floor(x);
}

LayerField::LayerField(const LayerParams& p, int ns, int nt)
    : params(p), n_s(ns), n_t(nt), psi(static_cast<std::size_t>(ns) * nt) {
  if (ns < 4 || nt < 16) throw Error(ErrorKind::shape, "layer grid too small");
  if (!(p.eps > 0.0)) throw Error(ErrorKind::domain, "layer needs eps > 0");
}

void write_layer_field(const LayerField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path);
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(field.n_s),
                                 static_cast<std::uint32_t>(field.n_t)};
  const double hdr[4] = {field.params.k, field.params.eps, field.params.b, field.params.delta_eps};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  out.write(reinterpret_cast<const char*>(field.psi.data()),
            static_cast<std::streamsize>(field.psi.size() * sizeof(cplx)));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

LayerField read_layer_field(const std::string& path, double c0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::uint32_t dims[2];
  double hdr[4];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (!in) throw Error(ErrorKind::io, "truncated header in " + path);
  LayerParams p{hdr[0], hdr[1], hdr[2], hdr[3], c0};
  LayerField f(p, static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  in.read(reinterpret_cast<char*>(f.psi.data()),
          static_cast<std::streamsize>(f.psi.size() * sizeof(cplx)));
  if (!in) throw Error(ErrorKind::io, "truncated data in " + path);
  return f;
}

LayerField phase_field(const Profile1D& profile, const LayerParams& params, int n_s, double beta) {
  LayerField f(params, n_s, static_cast<int>(profile.f.size()));
  const double hs = f.hs();
  for (int j = 0; j < n_s; ++j) {
    const cplx ph = std::polar(1.0, -beta * j * hs);
    for (int i = 0; i < f.n_t; ++i) f.at(i, j) = profile.f[i] * ph;
  }
  return f;
}

namespace {

struct Coeffs {
  std::vector<double> t, w, m, link, a;
};

Coeffs coefficients(const LayerField& field, Variant variant) {
  const auto& p = field.params;
  const int n = field.n_t;
  const double ht = field.ht();
  const double kk = variant == Variant::disc ? p.k : 0.0;
  Coeffs c;
  c.t.resize(n);
  c.w.resize(n);
  c.m.resize(n);
  c.a.resize(n);
  c.link.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    const double t = i * ht;
    c.t[i] = t;
    c.w[i] = curved_weight(kk, p.eps, t);
    if (c.w[i] <= 0.0) throw Error(ErrorKind::domain, "weight 1 - eps k t is not positive");
    c.m[i] = (i == 0 || i == n - 1) ? 0.5 * ht : ht;
    c.a[i] = -t + 0.5 * p.eps * kk * t * t + p.eps * p.delta_eps;
  }
  for (int i = 0; i + 1 < n; ++i) c.link[i] = curved_weight(kk, p.eps, (i + 0.5) * ht) / ht;
  return c;
}

// Spectral s-derivative of every row.
std::vector<cplx> ds_field(const LayerField& field, const std::vector<cplx>& psi) {
  const int ns = field.n_s;
  const double L = field.params.length();
  Eigen::FFT<double> fft;
  std::vector<cplx> row(ns), spec(ns), out(psi.size());
  for (int i = 0; i < field.n_t; ++i) {
    std::copy_n(psi.begin() + static_cast<std::ptrdiff_t>(i) * ns, ns, row.begin());
    fft.fwd(spec, row);
    for (int m = 0; m < ns; ++m) {
      int mm = m <= ns / 2 ? m : m - ns;
      if (ns % 2 == 0 && m == ns / 2) mm = 0;
      spec[m] *= cplx(0.0, 2.0 * std::numbers::pi * mm / L);
    }
    fft.inv(row, spec);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i) * ns);
  }
  return out;
}

std::vector<cplx> masked(const LayerField& field, Variant variant) {
  std::vector<cplx> psi = field.psi;
  if (variant == Variant::flat)
    std::fill(psi.end() - field.n_s, psi.end(), cplx(0.0, 0.0));
  return psi;
}

void check_profile(const LayerField& field, const OptimalProfile& opt, Variant variant) {
  const auto& q = opt.profile.params;
  const auto& p = field.params;
  if (opt.trivial || opt.profile.trivial)
    throw Error(ErrorKind::division, "splitting needs a positive profile (trivial regime)");
  if (static_cast<int>(opt.profile.f.size()) != field.n_t ||
      std::abs(opt.profile.t.back() - p.t_max()) > 1e-12 * p.t_max() || q.eps != p.eps ||
      q.b != p.b || (variant == Variant::disc ? q.k != p.k : q.k != 0.0))
    throw Error(ErrorKind::shape, "profile and layer field do not share grid or parameters");
  for (double v : opt.profile.f)
    if (!(v > 0.0)) throw Error(ErrorKind::division, "profile has a zero on the grid");
}

}  // namespace

double eval_layer_energy(const LayerField& field, Variant variant) {
  const Coeffs c = coefficients(field, variant);
  const auto psi = masked(field, variant);
  const auto dpsi = ds_field(field, psi);
  const int ns = field.n_s, nt = field.n_t;
  const double b = field.params.b;
  double e = 0.0;
  for (int j = 0; j < ns; ++j) {
    double col = 0.0;
    for (int i = 0; i + 1 < nt; ++i)
      col += c.link[i] * std::norm(psi[(i + 1) * ns + j] - psi[i * ns + j]);
    for (int i = 0; i < nt; ++i) {
      const cplx v = psi[i * ns + j];
      const double r2 = std::norm(v);
      const cplx cov = dpsi[i * ns + j] + cplx(0.0, c.a[i]) * v;
      col += c.m[i] * c.w[i] * (std::norm(cov) / (c.w[i] * c.w[i]) - r2 / b + r2 * r2 / (2.0 * b));
    }
    e += col;
  }
  return e * field.hs();
}

namespace {

struct TermSums {
  double kin_t = 0.0, kin_s = 0.0, mom = 0.0, quart = 0.0;
  double lb_region = 0.0;  // sum over the certified region of w K (|d_t u|^2 + |d_s u|^2 / w^2)
};

TermSums term_sums(const LayerField& field, const OptimalProfile& opt, Variant variant,
                   const std::vector<double>* K, int ibar) {
  const Coeffs c = coefficients(field, variant);
  const auto psi = masked(field, variant);
  const auto dpsi = ds_field(field, psi);
  const auto& f = opt.profile.f;
  const auto& q = opt.profile.params;
  const int ns = field.n_s, nt = field.n_t;
  const double b = field.params.b;
  const double chi = opt.alpha_k + field.params.eps * field.params.delta_eps;
  const double kk = variant == Variant::disc ? q.k : 0.0;
  TermSums s;
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i + 1 < nt; ++i) {
      const cplx dv = psi[(i + 1) * ns + j] / f[i + 1] - psi[i * ns + j] / f[i];
      const double kin = c.link[i] * f[i + 1] * f[i] * std::norm(dv);
      s.kin_t += kin;
      if (K && i + 1 <= ibar) s.lb_region += c.link[i] * 0.5 * ((*K)[i] + (*K)[i + 1]) * std::norm(dv);
    }
    for (int i = 0; i < nt; ++i) {
      const cplx v = psi[i * ns + j];
      const cplx x = dpsi[i * ns + j] + cplx(0.0, chi) * v;
      const double w = c.w[i];
      const double bk = (c.t[i] + opt.alpha_k - 0.5 * q.eps * kk * c.t[i] * c.t[i]) / (w * w);
      const double mw = c.m[i] * w;
      const double ks = mw * std::norm(x) / (w * w);
      s.kin_s += ks;
      s.mom += -2.0 * mw * bk * std::imag(std::conj(v) * x);
      const double d = f[i] * f[i] - std::norm(v);
      s.quart += mw * d * d / (2.0 * b);
      if (K && i <= ibar) s.lb_region += ks * (*K)[i] / (f[i] * f[i]);
    }
  }
  const double hs = field.hs();
  s.kin_t *= hs;
  s.kin_s *= hs;
  s.mom *= hs;
  s.quart *= hs;
  s.lb_region *= hs;
  return s;
}

}  // namespace

SplitResult split_energy(const LayerField& field, const OptimalProfile& opt, Variant variant) {
  check_profile(field, opt, variant);
  const TermSums s = term_sums(field, opt, variant, nullptr, -1);
  SplitResult r;
  r.total = eval_layer_energy(field, variant);
  r.main = field.params.length() * opt.profile.energy;
  r.reduced = s.kin_t + s.kin_s + s.mom + s.quart;
  r.mismatch = r.total - r.main - r.reduced;
  return r;
}

ReducedTerms reduced_terms(const LayerField& field, const OptimalProfile& opt, double d_eps,
                           Variant variant) {
  check_profile(field, opt, variant);
  const auto& f = opt.profile.f;
  const int n = static_cast<int>(f.size());
  const auto F = potential_F(opt);
  std::vector<double> K(n);
  for (int i = 0; i < n; ++i) K[i] = (1.0 - d_eps) * f[i] * f[i] + F[i];
  const double l = std::abs(std::log(field.params.eps));
  int ibar = -1;
  for (int i = n - 1; i >= 0; --i)
    if (f[i] >= l * l * l * f.back()) {
      ibar = i;
      break;
    }
  const TermSums s = term_sums(field, opt, variant, &K, ibar);
  ReducedTerms r;
  r.kinetic_t = s.kin_t;
  r.kinetic_s = s.kin_s;
  r.momentum = s.mom;
  r.quartic = s.quart;
  r.reduced = s.kin_t + s.kin_s + s.mom + s.quart;
  r.certified_lower_bound = s.lb_region + d_eps * (s.kin_t + s.kin_s) + s.quart;
  r.chain_ok = r.reduced >= r.certified_lower_bound - 1e-8 * std::max(1.0, std::abs(r.reduced));
  return r;
}

ReducedField reduced_from_u(std::vector<cplx> u, int n_s, int n_t, double hs, double ht, cplx wrap) {
  if (n_s < 2 || n_t < 2 || u.size() != static_cast<std::size_t>(n_s) * n_t)
    throw Error(ErrorKind::shape, "u grid does not match its dimensions");
  ReducedField r;
  r.n_s = n_s;
  r.n_t = n_t;
  r.hs = hs;
  r.ht = ht;
  r.wrap = wrap;
  r.u = std::move(u);
  auto nb = [&](int i, int j) { return j < n_s ? r.at(i, j) : wrap * r.at(i, j - n_s); };
  r.current_s.resize(r.u.size());
  for (int i = 0; i < n_t; ++i)
    for (int j = 0; j < n_s; ++j)
      r.current_s[i * n_s + j] = std::imag(std::conj(r.at(i, j)) * nb(i, j + 1)) / hs;
  r.vorticity.resize(static_cast<std::size_t>(n_t - 1) * n_s);
  r.grad_sq.resize(r.vorticity.size());
  r.max_excess = -std::numeric_limits<double>::infinity();
  r.control_ok = true;
  for (int i = 0; i + 1 < n_t; ++i)
    for (int j = 0; j < n_s; ++j) {
      const cplx u00 = r.at(i, j), u10 = nb(i, j + 1), u01 = r.at(i + 1, j), u11 = nb(i + 1, j + 1);
      const cplx ds = ((u10 - u00) + (u11 - u01)) / (2.0 * hs);
      const cplx dt = ((u01 - u00) + (u11 - u10)) / (2.0 * ht);
      const double mu = 2.0 * std::imag(std::conj(ds) * dt);
      const double g2 = std::norm(ds) + std::norm(dt);
      r.vorticity[i * n_s + j] = mu;
      r.grad_sq[i * n_s + j] = g2;
      r.max_excess = std::max(r.max_excess, std::abs(mu) - g2);
      if (std::abs(mu) > g2 * (1.0 + 1e-12) + 1e-10) r.control_ok = false;
    }
  return r;
}

ReducedField compute_current_vorticity(const LayerField& field, const OptimalProfile& opt,
                                       double f_floor) {
  const auto& f = opt.profile.f;
  if (static_cast<int>(f.size()) != field.n_t) throw Error(ErrorKind::shape, "profile grid mismatch");
  const double fmax = *std::max_element(f.begin(), f.end());
  if (!(fmax > 0.0)) throw Error(ErrorKind::division, "trivial profile has no reduced field");
  int rows = 0;
  while (rows < field.n_t && f[rows] >= f_floor * fmax) ++rows;
  if (rows < 2) throw Error(ErrorKind::division, "profile vanishes near the boundary");
  const int ns = field.n_s;
  const double hs = field.hs();
  const double chi = opt.alpha_k + field.params.eps * field.params.delta_eps;
  std::vector<cplx> u(static_cast<std::size_t>(rows) * ns);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < ns; ++j) u[i * ns + j] = field.at(i, j) * std::polar(1.0, chi * j * hs) / f[i];
  return reduced_from_u(std::move(u), ns, rows, hs, field.ht(),
                        std::polar(1.0, chi * field.params.length()));
}

double box_vorticity(const ReducedField& r, int i0, int i1, int j0, int j1) {
  double s = 0.0;
  for (int i = i0; i < i1; ++i)
    for (int j = j0; j < j1; ++j) s += r.vorticity[i * r.n_s + j];
  return s * r.hs * r.ht;
}

double boundary_circulation_u(const ReducedField& r) {
  double s = 0.0;
  for (int j = 0; j < r.n_s; ++j) {
    const cplx a = r.at(0, j);
    const cplx b = j + 1 < r.n_s ? r.at(0, j + 1) : r.wrap * r.at(0, 0);
    s += std::abs(a) * std::abs(b) * std::arg(std::conj(a) * b);
  }
  return s;
}

}  // namespace surfsc
