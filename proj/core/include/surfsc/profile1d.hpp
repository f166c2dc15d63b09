#pragma once

#include <string>
#include <vector>

#include "surfsc/functional1d.hpp"
#include "surfsc/spectral.hpp"

namespace surfsc {

struct ProfileParams {
  double k = 0.0;
  double alpha = 0.0;
  double eps = 0.0;  // eps = 0 only with k = 0; the interval is then [0, T]
  double b = 1.5;
  double c0 = 4.0;
  int n_points = 2048;
  double truncation_T = 12.0;
};

struct Profile1D {
  ProfileParams params;
  std::vector<double> t;
  std::vector<double> f;
  double h = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool trivial = false;
  int iterations = 0;
};

Grid1D profile_grid(const ProfileParams& p);
Functional1D profile_functional(const ProfileParams& p);

// eps from the GL parameter kappa: eps = 1 / (sqrt(b) kappa).
double eps_from_kappa(double kappa, double b);

// Critical point of the discrete functional on the non-negative branch. Returns the
// zero profile when 1/b <= mu_eps(k, alpha) on the same operator.
Profile1D minimize_profile(const ProfileParams& p, const MinimizeOptions& opt = {},
                           const std::vector<double>* warm_start = nullptr);

struct AlphaSearch {
  double c0 = 4.0;
  int n_points = 2048;
  double truncation_T = 12.0;
  double scan_step = 0.02;
  double alpha_tol = 1e-8;
  bool regime_guard = true;
};

struct OptimalProfile {
  double alpha_k = 0.0;
  Profile1D profile;
  double fh_residual = 0.0;
  bool trivial = false;
  std::vector<double> local_minima;  // every alpha where the scan showed a local minimum
  std::vector<std::pair<double, double>> scan;  // (alpha, energy)
};

// Minimises E^1D_{k,alpha} over alpha inside the non-trivial window.
OptimalProfile optimize_alpha(double k, double eps, double b, const AlphaSearch& cfg = {});

// sum m (t + alpha - eps k t^2/2) / (1 - eps k t) f^2: half of dE/dalpha.
double fh_integral(const Profile1D& p);

struct IdentityPair {
  double lhs = 0.0;
  double rhs = 0.0;
};
IdentityPair energy_identity(const Profile1D& p);

enum class Stencil { discrete, continuum };
// Max norm of -f'' + (eps k / w) f' + V f - (1/b)(1 - f^2) f. The discrete stencil is the
// exact gradient of the minimised functional; the continuum stencil is fourth order and
// measures the truncation error of the scheme at interior nodes.
double ode_residual(const Profile1D& p, Stencil stencil = Stencil::discrete);

// Central differences, one-sided zero at the Neumann ends.
std::vector<double> profile_derivative(const Profile1D& p);

struct PointwiseReport {
  double C_upper = 0.0;  // f <= C exp(-(t+alpha)^2/2)
  double c_lower = 0.0;  // f >= c exp(-(t+sqrt 2)^2/2)
  double ratio = 0.0;
  bool ok = false;
};
PointwiseReport pointwise_bounds_check(const Profile1D& p, double ratio_cap = 1e6);

struct GradientReport {
  double C_near = 0.0;   // max |f'| on [0, |alpha| + 2/sqrt b]
  double C_tail = 0.0;   // max |f'|/f / |log eps|^3 beyond it
  bool monotone_tail = false;
  double monotone_from = 0.0;
  bool ok = false;
};
GradientReport gradient_bound_check(const Profile1D& p);

}  // namespace surfsc
