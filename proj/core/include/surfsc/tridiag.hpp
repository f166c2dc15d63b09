#pragma once

#include <vector>

namespace surfsc {

// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(const std::vector<double>& x) const;
  double max_row_sum() const;
};

// Thomas algorithm for a general tridiagonal system. Returns false on a zero pivot.
bool solve_tridiag(const std::vector<double>& sub, const std::vector<double>& diag,
                   const std::vector<double>& sup, std::vector<double>& rhs);

// LDL^T of a symmetric tridiagonal matrix shifted by -sigma; solves in place.
// Returns false if any pivot is non-positive (matrix - sigma not positive definite).
bool solve_spd_tridiag(const SymTridiag& a, double sigma, std::vector<double>& rhs);

// Number of eigenvalues strictly below x (Sturm sequence).
int sturm_count(const SymTridiag& a, double x);

// Lowest eigenvalue by bisection on the Sturm count.
double lowest_eigenvalue_bisect(const SymTridiag& a, double rel_tol = 1e-15);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm
  double residual = 0.0;       // max |A v - value v| / max(1, max_row_sum)
  int iterations = 0;
};

// Shifted inverse iteration started from the bisection estimate.
EigenPair lowest_eigenpair(const SymTridiag& a, double tol, int max_iter);

}  // namespace surfsc
