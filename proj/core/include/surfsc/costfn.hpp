#pragma once

#include <vector>

#include "surfsc/profile1d.hpp"

namespace surfsc {

struct CostCurve {
  std::vector<double> t;
  std::vector<double> f;
  std::vector<double> F;
  std::vector<double> K;
  std::vector<bool> in_region;
  double d_eps = 0.0;
  double t_bar = 0.0;
  double beta_eps = 0.0;
  double min_K_certified = 0.0;
  double min_K_global = 0.0;
  double argmin_K = 0.0;
  // K0 only: worst mismatch of the critical-point identity over interior local minima.
  double critical_identity_err = 0.0;
  int critical_points = 0;
  // Kk only: min over I_eps of f^2 + F - (|log eps|^{-3} f^2 - beta).
  double intermediate_margin = 0.0;
  bool certified = false;
};

struct CostOptions {
  double tolerance = 1e-8;      // K >= -tolerance counts as non-negative
  double fh_tolerance = 1e-8;   // |fh_residual| allowed for potential_F
  bool report_only = false;     // record signs without raising certificate failures
};

// Cumulative trapezoid of 2 (t + alpha - eps k t^2/2)/(1 - eps k t) f^2.
std::vector<double> potential_F(const OptimalProfile& opt, double fh_tolerance = 1e-8);

// -f'^2 + (t + alpha)^2 f^2 - f^2/b + f^4/(2b), with f'^2 taken as D+f D-f (zero at the ends).
std::vector<double> F0_closed_form(const Profile1D& p);

// Max over the grid of |F_quadrature - F_closed| for a k = 0 profile.
double F0_closed_form_check(const OptimalProfile& opt);

// The same discrepancy after Richardson extrapolation across grids n and 2n - 1,
// evaluated on the shared nodes.
double F0_closed_form_richardson(double b, const AlphaSearch& cfg = {});

CostCurve cost_K0(const OptimalProfile& opt, const CostOptions& o = {});
CostCurve cost_Kk(const OptimalProfile& opt, double d_eps, const CostOptions& o = {});

// 0.5 |log eps|^{-4}.
double d_eps_auto(double eps);

}  // namespace surfsc
