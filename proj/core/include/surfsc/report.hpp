#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "surfsc/gl2d.hpp"

namespace surfsc {

struct ScalingFit {
  double p_hat = 0.0;     // fitted exponent of eps
  double C_hat = 0.0;     // exp(intercept)
  double residual = 0.0;  // rms of the log-space residuals
  double envelope = 0.0;  // max value / (eps^p |log eps|^q), p the target if given else p_hat
};

// Least squares of log(value) - q log|log eps| against log eps.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples, double q,
                       std::optional<double> p_target = std::nullopt);

enum class Status { pass, fail, report_only, skipped };
const char* to_string(Status s);
Status status_from_string(const std::string& s);

struct Verdict {
  std::string id;
  Status status = Status::fail;
  std::map<std::string, double> constants;
  std::optional<double> exponent;
  std::optional<double> exponent_target;
  std::vector<std::string> artifacts;
  std::string message;
};

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

struct SweepConfig {
  std::vector<double> eps_list{0.12, 0.08, 0.05};
  std::vector<double> b_list{1.5};
  double R = 1.0;
  double c0 = 4.0;  // lowered per eps so that eps k c0 |log eps| <= 0.75
  int n_points = 2048;
  double disc_dt0 = 0.08;
  double disc_growth = 1.02;
  double disc_depth = 10.0;
  double disc_ds = 0.12;
  std::vector<double> k0_b_list{1.0, 1.2, 1.4, 1.6, 1.69};
  int k0_n_points = 4095;
  std::vector<double> kk_b_list{1.2, 1.5};
  std::vector<double> kk_eps_list{0.1, 0.05};
  int identity_samples = 20;
  int trivial_samples = 10;
  double pan_eps = 0.05;
  double winding_eps = 0.08;
  double vorticity_box_cells = 40;
  std::uint64_t seed = 1;
  std::string output_dir = "surfsc_out";
  std::vector<std::string> only;  // empty: every check
};

void to_json(nlohmann::json& j, const SweepConfig& c);
void from_json(const nlohmann::json& j, SweepConfig& c);

// c0 actually used at a given eps and curvature.
double capped_c0(double c0, double eps, double k);

// One 2D cell of the sweep.
struct DiscCell {
  double eps = 0.0;
  double b = 0.0;
  double alpha_k = 0.0;
  double e1d_k = 0.0;
  double e_trial = 0.0;
  double e_min = 0.0;
  double e_min_other = 0.0;  // second start
  double e_matched = 0.0;    // disc energy of the best rotationally symmetric state with real winding
  double gap = 0.0;          // |E_min - 2 pi R e1d_k / eps|
  double gap_matched = 0.0;  // |E_min - e_matched|
  double l2_err = 0.0;
  double linf_layer_err = 0.0;
  double linf_boundary_err = 0.0;
  long degree = 0;
  long degree_inner = 0;
  double degree_predicted = 0.0;
  double degree_literal = 0.0;
  double degree_physical = 0.0;
  double decay_rate = 0.0;
  double decay_quality = 0.0;
  double u_circulation = 0.0;
  double split_mismatch = 0.0;
  double vorticity_excess = 0.0;
  bool vorticity_ok = false;
  bool chain_ok = false;
  bool converged = false;
  std::string error;
};

struct DiscCellResult {
  DiscCell cell;
  DiscField field;
  LayerField layer;
  OptimalProfile profile;
};

struct DiscRunOptions {
  int n_r = 0;      // 0: from the sweep grid settings
  int n_theta = 0;
  GaugeMode mode = GaugeMode::fixed;
  bool random_init = false;  // single random-phase start instead of the trial windings
};

DiscCellResult run_disc_cell(double eps, double b, const SweepConfig& cfg, const DiscRunOptions& run = {});

struct SweepResult {
  std::vector<Verdict> verdicts;
  std::vector<DiscCell> cells;
  nlohmann::json to_json() const;
  bool all_pass() const;  // every pass/fail verdict passes
};

// Individual checks, also used by the acceptance driver.
Verdict check_theta0();
Verdict check_oscillator_anchor();
Verdict check_trivial_regime(int samples);
Verdict check_identity_suite(int samples, std::uint64_t seed);
Verdict check_k0_positivity(const std::vector<double>& b_list, int n_points);
Verdict check_kk_positivity(const std::vector<double>& b_list, const std::vector<double>& eps_list);
// Synthetic fields plus any extracted layer fields given.
Verdict check_vorticity(const std::vector<const LayerField*>& fields,
                        const std::vector<const OptimalProfile*>& profiles, double box_cells);
Verdict check_disc_energy(const std::vector<DiscCell>& cells);
Verdict check_density_l2(const std::vector<DiscCell>& cells);
Verdict check_pan_linf(const std::vector<DiscCell>& cells, double eps);
Verdict check_pan_boundary(const std::vector<DiscCell>& cells);
Verdict check_winding(const std::vector<DiscCell>& cells, double eps);
Verdict check_agmon(const std::vector<DiscCell>& cells);
Verdict check_u_circulation(const std::vector<DiscCell>& cells);

// Runs every enabled check, writes CSV tables and verdicts.json into output_dir.
SweepResult run_sweep(const SweepConfig& cfg);

}  // namespace surfsc
