#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "beamsim/control.hpp"
#include "beamsim/engine.hpp"
#include "beamsim/params.hpp"

namespace beamsim {

/// Actuator work over the episode, positive-power parts only:
/// sum of [(F_x v_x)+ + (tau1 alpha_dot)+ + (tau2 beta_dot)+] dt, in mJ.
/// Split into the fore-aft motor part and the two rotation motors.
struct EnergySplit {
  double fx_mJ = 0.0;
  double torque_mJ = 0.0;
  double total() const { return fx_mJ + torque_mJ; }
};
EnergySplit energy_split(const EpisodeLog& log, const WorldConfig& config);
double energy_cost_mJ(const EpisodeLog& log, const WorldConfig& config);

/// Outcome classification: flipped when termination flagged it; stuck on
/// timeout short of the stuck threshold; otherwise roll when |roll| reached
/// the threshold while the body overlapped the beam plane, else pitch.
TraversalMode classify_mode(const EpisodeLog& log, const WorldConfig& config);

std::string to_string(TraversalMode mode);
std::string to_string(Termination termination);

/// Fills log.outcome and log.energy_mJ.
void finalize_episode(EpisodeLog& log, const WorldConfig& config);

enum class SweepVariable { kFrequency, kAmplitude, kSensingTime, kDelay, kStrategy };

struct SweepSpec {
  SweepVariable variable = SweepVariable::kFrequency;
  /// Cell values: Hz / m / s / s; for kStrategy these are stiffness values
  /// applied to both beams, crossed with the four strategy presets.
  std::vector<double> values;
  int trials = 5;
  std::uint64_t seed_base = 1;
  bool corrupt_lateral = false;  // zero the pose Y before estimating
  WorldConfig base;
};

/// One sweep observation (one trial in one cell). Estimation sweeps fill
/// the k fields; strategy/delay sweeps fill outcome and energy.
struct MetricsRow {
  std::string cell;
  double value = 0.0;
  std::string strategy;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string outcome;
  double energy_mJ = nan_value();
  double energy_fx_mJ = nan_value();
  double energy_torque_mJ = nan_value();
  double k1_hat = nan_value(), k2_hat = nan_value();
  double err_k1 = nan_value(), err_k2 = nan_value();
  double t_c = nan_value(), t_s = nan_value();
  std::string error;  // per-trial failure note; sweep continues

  static double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }
};

std::vector<MetricsRow> run_sweep(const SweepSpec& spec);

/// Per-cell aggregation (means and sample variances over trials).
struct CellStats {
  std::string cell;
  int n = 0;
  double mean_err_k1 = 0.0, mean_err_k2 = 0.0;
  double var_err_k1 = 0.0, var_err_k2 = 0.0;
  double mean_k1 = 0.0, mean_k2 = 0.0;
  double mean_energy_mJ = 0.0;
  double mean_energy_fx_mJ = 0.0, mean_energy_torque_mJ = 0.0;
};
std::vector<CellStats> aggregate_rows(const std::vector<MetricsRow>& rows);

struct ReproduceResult {
  std::vector<MetricsRow> rows;
  std::vector<CellStats> stats;
  std::string report;  // side-by-side reference vs obtained text
};

/// Canned studies: "table1" (oscillation frequency), "table2" (oscillation
/// amplitude), "table3" (sensing time), "fig6" (lateral-position corruption),
/// "fig8" (sensorimotor delay), "strategy-table" (4 strategies x 2
/// stiffnesses). Throws std::invalid_argument for unknown names.
ReproduceResult reproduce(const std::string& name, const WorldConfig& base);

}  // namespace beamsim
