#pragma once

#include <utility>
#include <vector>

#include "surfsc/functional1d.hpp"

namespace surfsc {

struct Grid1D {
  std::vector<double> t;
  double h = 0.0;
  double t_max = 0.0;
};

Grid1D uniform_grid(double t_max, int n);

// c0 |log eps| for eps > 0, T for eps = 0.
double interval_length(double eps, double c0, double T = 12.0);

// Weight 1 - eps k t.
double curved_weight(double k, double eps, double t);
// (t + alpha - eps k t^2 / 2) / (1 - eps k t), the square root of the potential with sign.
double curved_drift(double k, double alpha, double eps, double t);
double curved_potential(double k, double alpha, double eps, double t);

// Trapezoidal, weight-symmetrised discretisation of
//   int (1-eps k t) { f'^2 + V f^2 - f^2/b + f^4/(2b) } dt
// on the given grid. Neumann conditions are natural.
Functional1D curved_functional(double k, double alpha, double eps, double b, const Grid1D& grid);

struct OscillatorSpec {
  double alpha = 0.0;
  double truncation_T = 12.0;
  int n_points = 4097;
};

struct CurvedOperatorSpec {
  double k = 0.0;
  double alpha = 0.0;
  double eps = 0.05;
  double c0 = 4.0;
  int n_points = 2048;
  double truncation_T = 12.0;  // used only when eps == 0
};

struct SpectralResult {
  double mu = 0.0;
  std::vector<double> t;
  std::vector<double> phi;  // sum mass phi^2 = 1
  double residual = 0.0;
  int iterations = 0;
};

struct EigenTolerance {
  double tol = 1e-12;
  int max_iter = 500;
};

// Lowest eigenpair of the quadratic form of fn in the mass inner product.
// With dirichlet_right the last node is pinned to zero.
SpectralResult ground_state(const Functional1D& fn, const std::vector<double>& t,
                            bool dirichlet_right = false, const EigenTolerance& tol = {});

// d mu / d alpha by the Feynman-Hellmann formula for a normalised ground state.
double fh_derivative(const SpectralResult& r, double k, double alpha, double eps,
                     const std::vector<double>& mass);

SpectralResult mu_osc(const OscillatorSpec& spec, const EigenTolerance& tol = {});
SpectralResult mu_eps(const CurvedOperatorSpec& spec, const EigenTolerance& tol = {});

// |mu_eps - mu_osc| / (eps |log eps|^3) at the spec's parameters and interval.
double osc_deviation_constant(const CurvedOperatorSpec& spec);

struct Theta0Config {
  double truncation_T = 12.0;
  int n_points = 4097;
  double scan_lo = -1.5;
  double scan_hi = 0.0;
  double scan_step = 0.05;
};

struct Theta0Result {
  double theta0 = 0.0;
  double alpha0 = 0.0;
  std::vector<std::pair<double, double>> trace;  // (alpha, mu) scan samples
};

Theta0Result find_theta0(const Theta0Config& cfg = {});

struct WindowConfig {
  double c0 = 4.0;
  int n_points = 2048;
  double truncation_T = 12.0;
  double scan_step = 0.05;
};

struct AlphaWindow {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_clamped = false;
  double mu_min = 0.0;
  double alpha_at_min = 0.0;
  std::vector<std::pair<double, double>> trace;
};

// Interval of alpha on which mu_eps(k, alpha) < 1/b, on the same discrete operator
// used by the profile solver.
AlphaWindow alpha_window(double b, double k, double eps, const WindowConfig& cfg = {});

}  // namespace surfsc
