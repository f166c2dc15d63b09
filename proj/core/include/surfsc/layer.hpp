#pragma once

#include <complex>
#include <string>
#include <vector>

#include "surfsc/profile1d.hpp"

namespace surfsc {

using cplx = std::complex<double>;

struct LayerParams {
  double k = 1.0;
  double eps = 0.05;
  double b = 1.5;
  double delta_eps = 0.0;
  double c0 = 4.0;

  double radius() const { return k > 0.0 ? 1.0 / k : 1.0; }
  // |boundary| / eps
  double length() const;
  double t_max() const;
};

// Fractional part of R / (2 eps^2).
double delta_eps_for(double R, double eps);

// psi on [0, L_s) x [0, t_max]; rows are t, columns are s, periodic in s.
struct LayerField {
  LayerParams params;
  int n_s = 0;
  int n_t = 0;
  std::vector<cplx> psi;

  LayerField() = default;
  LayerField(const LayerParams& p, int ns, int nt);
  cplx& at(int it, int is) { return psi[static_cast<std::size_t>(it) * n_s + is]; }
  const cplx& at(int it, int is) const { return psi[static_cast<std::size_t>(it) * n_s + is]; }
  double hs() const { return params.length() / n_s; }
  double ht() const { return params.t_max() / (n_t - 1); }
};

void write_layer_field(const LayerField& field, const std::string& path);
LayerField read_layer_field(const std::string& path, double c0 = 4.0);

// psi = f(t) exp(-i beta s) on an n_s column grid matching the profile's t grid.
LayerField phase_field(const Profile1D& profile, const LayerParams& params, int n_s, double beta);

enum class Variant { disc, flat };

double eval_layer_energy(const LayerField& field, Variant variant = Variant::disc);

struct SplitResult {
  double total = 0.0;
  double main = 0.0;
  double reduced = 0.0;
  double mismatch = 0.0;  // total - main - reduced
};

SplitResult split_energy(const LayerField& field, const OptimalProfile& opt,
                         Variant variant = Variant::disc);

struct ReducedTerms {
  double kinetic_t = 0.0;
  double kinetic_s = 0.0;
  double momentum = 0.0;
  double quartic = 0.0;
  double reduced = 0.0;
  double certified_lower_bound = 0.0;
  bool chain_ok = false;
};

ReducedTerms reduced_terms(const LayerField& field, const OptimalProfile& opt, double d_eps = 0.0,
                           Variant variant = Variant::disc);

struct ReducedField {
  int n_s = 0;
  int n_t = 0;  // rows kept (f above the floor)
  double hs = 0.0;
  double ht = 0.0;
  cplx wrap{1.0, 0.0};  // u(s + L_s) = wrap * u(s)
  std::vector<cplx> u;
  std::vector<double> current_s;  // link current on (i, j) -> (i, j+1), per unit length
  std::vector<double> vorticity;  // plaquettes, (n_t - 1) x n_s
  std::vector<double> grad_sq;    // |grad u|^2 on the same plaquettes
  double max_excess = 0.0;        // max (|mu| - |grad u|^2)
  bool control_ok = false;

  const cplx& at(int it, int is) const { return u[static_cast<std::size_t>(it) * n_s + is]; }
};

// u = psi exp(i (alpha_k + eps delta) s) / f_k on the rows where f_k >= f_floor * max f_k.
ReducedField compute_current_vorticity(const LayerField& field, const OptimalProfile& opt,
                                       double f_floor = 1e-6);

// Current and vorticity of a given u sampled on a uniform grid.
ReducedField reduced_from_u(std::vector<cplx> u, int n_s, int n_t, double hs, double ht,
                            cplx wrap = {1.0, 0.0});

// Sum of mu * cell area over plaquettes [i0, i1) x [j0, j1).
double box_vorticity(const ReducedField& r, int i0, int i1, int j0, int j1);

// int (iu, d_s u) ds on the row t = 0, with link phases taken as angles.
double boundary_circulation_u(const ReducedField& r);

}  // namespace surfsc
