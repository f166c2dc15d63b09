#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "surfsc/layer.hpp"
#include "surfsc/profile1d.hpp"

namespace surfsc {

struct DiscGridConfig {
  double R = 1.0;
  double eps = 0.08;
  double dt0 = 0.08;        // first radial step at the boundary, in units of eps
  double growth = 1.02;     // geometric ratio of consecutive radial steps
  double depth_cap = 10.0;  // layer depth in units of eps, also capped at 0.75 R / eps
  double ds = 0.12;         // boundary arc step in units of eps
  int n_r = 0;              // 0: from dt0 and growth; otherwise the growth ratio is solved for
  int n_theta = 0;          // 0: from ds
};

// Annulus r_in <= r <= R; node 0 sits on the Dirichlet circle r_in, node n_r - 1 on the boundary.
struct DiscGrid {
  double R = 1.0;
  double eps = 0.08;
  int n_r = 0;
  int n_theta = 0;
  double dtheta = 0.0;
  std::vector<double> r;
  std::vector<double> dual;    // radial width of the control volume of each node
  std::vector<double> c_r;     // radial link weights r_{i+1/2} dtheta / dr_i
  std::vector<double> c_th;    // angular link weights dual_i / (r_i dtheta)
  std::vector<double> area;    // node control areas r_i dual_i dtheta

  static DiscGrid make(const DiscGridConfig& cfg);
  std::size_t nodes() const { return static_cast<std::size_t>(n_r) * n_theta; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_theta + j; }
  double depth() const { return (R - r.front()) / eps; }
  int nodes_within(double distance) const;
};

enum class GaugeMode { fixed, coupled };

// Psi on the grid plus link variables: a_th(i, j) integrates A along the arc (i, j) -> (i, j + 1),
// a_r(i, j) along the radial edge (i, j) -> (i + 1, j).
struct DiscField {
  DiscGrid grid;
  double b = 1.5;
  GaugeMode mode = GaugeMode::fixed;
  std::vector<cplx> psi;
  std::vector<double> a_r;
  std::vector<double> a_th;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;

  DiscField() = default;
  DiscField(const DiscGrid& g, double b_);
};

// A = (r/2) e_theta: a_r = 0, a_th = r^2 dtheta / 2.
void set_symmetric_gauge(DiscField& field);

struct EnergyParts {
  double kinetic = 0.0;
  double potential = 0.0;
  double field = 0.0;
  double total() const { return kinetic + potential + field; }
};

EnergyParts disc_energy_parts(const DiscField& field);
double disc_energy(const DiscField& field);

// Real gradient (d/dRe + i d/dIm) with respect to psi; node 0 is pinned and gets zero.
double disc_gradient(const DiscField& field, std::vector<cplx>& g_psi);
// Gradient with respect to the link variables.
double disc_gradient_links(const DiscField& field, std::vector<double>& g_r,
                           std::vector<double>& g_th);
// max |g| / (2 area / eps^2) over free nodes.
double psi_residual(const DiscField& field, const std::vector<cplx>& g_psi);

// Winding of f((R - r)/eps) exp(-i n theta) that the trial state uses.
long trial_winding(double R, double eps, double alpha_k);

// Profile interpolated at t = (R - r)/eps times exp(-i n theta), symmetric gauge.
DiscField build_trial(const OptimalProfile& opt, const DiscGrid& grid, long n);
DiscField build_trial(const OptimalProfile& opt, const DiscGrid& grid);
// Profile modulus with independent uniform phases at every free node.
DiscField random_start(const OptimalProfile& opt, const DiscGrid& grid, std::uint64_t seed);

struct GLOptions {
  GaugeMode mode = GaugeMode::fixed;
  double tol = 1e-8;
  int max_iter = 40000;
  int restart = 50;
  std::uint64_t seed = 1;
  double noise = 1e-3;
  int outer_max = 200;  // alternating sweeps in coupled mode
};

struct GLResult {
  DiscField field;
  long start_winding = 0;
  bool converged = false;
  std::vector<double> trace;  // energy every 50 iterations
};

// Nonlinear conjugate gradient from a given start; psi only in fixed mode, alternating
// psi / link sweeps in coupled mode.
GLResult minimize_gl_from(DiscField start, const GLOptions& opt);

struct GLStarts {
  std::vector<GLResult> runs;
  int best = 0;
  const GLResult& result() const { return runs[best]; }
};

// Starts from the trial windings floor and ceil of R^2/(2 eps^2) + R alpha_k / eps, each with
// seeded noise; keeps the lowest energy.
GLStarts minimize_gl(const OptimalProfile& opt, const DiscGrid& grid, const GLOptions& options);

// Rotationally symmetric states f(r) exp(-i n theta) on the same grid, n real.
struct RadialReduction {
  double alpha = 0.0;       // n = R^2/(2 eps^2) + R alpha / eps
  double n = 0.0;
  double energy = 0.0;      // disc energy
  double e_density = 0.0;   // eps energy / (2 pi R)
  std::vector<double> f;    // on the radial nodes, f[0] = 0
};

Functional1D radial_functional(const DiscGrid& grid, double b, double n);
RadialReduction radial_state(const DiscGrid& grid, double b, double n, const std::vector<double>* init = nullptr);
// Minimises the symmetric energy over real n near the 1D optimal phase.
RadialReduction radial_reduction(const DiscGrid& grid, double b, const OptimalProfile& opt);

// gamma_eps = C eps^q |log eps|^p; admissible iff it dominates eps^{1/6} |log eps|^{4/3}.
struct GammaRule {
  double C = 1.0;
  double q = 0.0;
  double p = -2.0;
  double value(double eps) const;
  bool admissible() const;
};

struct DensityReport {
  double l2_err = 0.0;         // || |Psi|^2 - f^2 ||_{L^2(disc)}
  double linf_layer_err = 0.0; // sup over f >= gamma of ||Psi| - f|
  double linf_boundary_err = 0.0;
  double gamma = 0.0;
  int layer_nodes = 0;
};

// Reference profile on the radial nodes (f[i] at r_i).
DensityReport density_checks(const DiscField& field, const std::vector<double>& f_ref,
                             const GammaRule& gamma);
std::vector<double> profile_on_grid(const OptimalProfile& opt, const DiscGrid& grid);

struct WindingReport {
  long degree = 0;
  double contour_r = 0.0;
  double min_modulus = 0.0;
  double predicted = 0.0;           // R^2/(2 eps^2) + |alpha_k|/eps
  double predicted_literal = 0.0;   // pi R^2/eps^2 + |alpha_k|/eps
  double predicted_physical = 0.0;  // R^2/(2 eps^2) - R |alpha_k|/eps
  double gap = 0.0;                 // ||degree| - predicted|
};

// Phase increments wrapped to (-pi, pi] along the circle r = contour_r (linear in r between rings).
WindingReport winding_number(const DiscField& field, double contour_r, double alpha_k,
                             double threshold);

// Flux average gamma_0 = (boundary circulation of A) / |boundary|.
double gamma0(const DiscField& field);

// Psi resampled on (s, t) with the gauge of the layer; t grid taken from the profile.
LayerField extract_layer_field(const DiscField& field, const OptimalProfile& opt);

struct AgmonFit {
  double rate = 0.0;
  double quality = 0.0;  // R^2 of the linear fit
  bool ok = false;
};

// Linear fit of log of the angular mean of |Psi| against t on [t_lo, t_hi].
AgmonFit agmon_decay_fit(const DiscField& field, double t_lo, double t_hi);

}  // namespace surfsc
