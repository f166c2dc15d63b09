#pragma once

#include <vector>

#include "surfsc/tridiag.hpp"

namespace surfsc {

// Discrete quartic functional
//   E[f] = sum_i link_i (f_{i+1} - f_i)^2 + sum_i (pot_i - mass_i / b) f_i^2 + sum_i mass_i f_i^4 / (2b)
// shared by the curved profile problem and the radial reduction of the disc energy.
struct Functional1D {
  std::vector<double> link;  // n - 1 edge weights
  std::vector<double> mass;  // n positive node weights
  std::vector<double> pot;   // n node potentials, already multiplied by mass
  double b = 1.5;

  int size() const { return static_cast<int>(mass.size()); }
  double energy(const std::vector<double>& f) const;
  std::vector<double> gradient(const std::vector<double>& f) const;
  SymTridiag hessian(const std::vector<double>& f) const;
  // Matrix of the quadratic form sum link (df)^2 + sum pot f^2.
  SymTridiag quadratic_form() const;
  // max_i |g_i| / (2 mass_i): the pointwise Euler-Lagrange residual.
  double residual(const std::vector<double>& f) const;
  // -(1/2b) sum mass f^4, equal to energy() at a critical point.
  double identity_energy(const std::vector<double>& f) const;
};

struct MinimizeOptions {
  double grad_tol = 1e-10;
  int max_newton = 200;
  int max_gradient_steps = 20000;
  int polish_steps = 2;
};

struct MinimizeResult {
  std::vector<double> f;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double tolerance = 0.0;  // requested tolerance, raised to the round-off floor if needed
  bool converged = false;
  std::vector<double> trace;  // energy after each accepted step
};

// Damped Newton with positivity projection; falls back to projected Barzilai-Borwein
// gradient steps when the line search stalls.
MinimizeResult minimize_functional(const Functional1D& fn, std::vector<double> init,
                                   const MinimizeOptions& opt = {});

// Projected gradient flow with Barzilai-Borwein steps only.
MinimizeResult minimize_projected_bb(const Functional1D& fn, std::vector<double> init,
                                     const MinimizeOptions& opt = {});

}  // namespace surfsc
