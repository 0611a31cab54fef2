#pragma once

#include <string>
#include <vector>

#include "beamsim/control.hpp"
#include "beamsim/engine.hpp"
#include "beamsim/estimator.hpp"
#include "beamsim/experiments.hpp"
#include "beamsim/landscape.hpp"
#include "beamsim/planner.hpp"

namespace beamsim {

/// One row per control step: t, X, Y, Z, alpha, beta, theta1, theta2,
/// Fx_sensed, Fy_sensed, Fz_sensed, u_Fx, u_t1, u_t2 (radians, N, N·m),
/// preceded by a schema comment line.
void write_episode_csv(const EpisodeLog& log, const std::string& path);

/// Episode summary: outcome, energy (total and split), events, angle
/// extrema (degrees), termination, and the config hash. `run` adds the
/// estimate/plan/fallback fields when present.
void write_episode_summary_json(const EpisodeLog& log, const WorldConfig& config,
                                const StrategyRunResult* run, const std::string& path);

struct EpisodeSamples {
  std::vector<ForceSample> forces;
  std::vector<PoseSample> poses;
};

/// Reads (t, pose, sensed force) back from an episode CSV.
EpisodeSamples read_episode_csv(const std::string& path);

/// Picks the nearest row to each sensor tick (rows are control-rate,
/// 50x denser than the sensor by default).
EpisodeSamples resample_to_sensor_rate(const EpisodeSamples& samples, double rate_hz);

/// Grid + metadata as JSON; values as a little-endian float64 block in a
/// sibling binary file (X-major, index (ix*na + ia)*na + ib).
void write_landscape(const EnergyLandscape& landscape, const std::string& json_path,
                     const std::string& bin_path);
EnergyLandscape read_landscape(const std::string& json_path);

/// One (alpha, beta) sheet at the grid X nearest to x: rows alpha, columns
/// beta, energies in J ("inf" for over-deflected cells).
void write_landscape_slice_csv(const EnergyLandscape& landscape, double x,
                               const std::string& path);

void write_plan_csv(const PlannedTrajectory& trajectory, const std::string& path);
void write_plan_json(const PlannedTrajectory& trajectory, const WorldConfig& config,
                     const std::string& path);

void write_estimate_json(const EstimateResult& estimate, const WorldConfig& config,
                         const std::string& path);

/// One row per trial; NaN fields stay empty.
void write_sweep_csv(const std::vector<MetricsRow>& rows, const std::string& path);
void write_cell_stats_csv(const std::vector<CellStats>& stats, const std::string& path);

}  // namespace beamsim
