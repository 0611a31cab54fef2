#include "beamsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "beamsim/estimator.hpp"
#include "beamsim/rng.hpp"

namespace beamsim {
namespace {

// Seed streams; the oscillation stream matches run_strategy so an
// estimation sweep episode and a strategy episode with the same seed see
// the same stimulus draw.
constexpr std::uint64_t kOscillationStream = 0x05c1;
constexpr std::uint64_t kEstimatorStream = 0x05c2;

std::string format_value(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

EnergySplit energy_split(const EpisodeLog& log, const WorldConfig& config) {
  EnergySplit split;
  for (const LogRow& r : log.rows) {
    split.fx_mJ += pos(r.u.f_x * r.state.v_x);
    split.torque_mJ +=
        pos(r.u.tau1 * r.state.alpha_dot) + pos(r.u.tau2 * r.state.beta_dot);
  }
  split.fx_mJ *= config.dt_control * 1000.0;
  split.torque_mJ *= config.dt_control * 1000.0;
  return split;
}

double energy_cost_mJ(const EpisodeLog& log, const WorldConfig& config) {
  return energy_split(log, config).total();
}

TraversalMode classify_mode(const EpisodeLog& log, const WorldConfig& config) {
  if (log.termination == Termination::kFlipped) return TraversalMode::kFlipped;
  if (log.termination == Termination::kTimeout &&
      log.final_state.pose.X < config.classify.stuck_x)
    return TraversalMode::kStuck;
  // Roll vs pitch: largest roll magnitude while the body's fore-aft extent
  // overlapped the beam plane at X = 0.
  const double overlap = config.body.a + config.beams[0].thickness / 2.0;
  double max_roll = 0.0;
  for (const LogRow& r : log.rows) {
    if (std::abs(r.state.pose.X) <= overlap)
      max_roll = std::max(max_roll, std::abs(r.state.pose.alpha));
  }
  return max_roll >= config.classify.roll_threshold ? TraversalMode::kTraversedRoll
                                                    : TraversalMode::kTraversedPitch;
}

std::string to_string(TraversalMode mode) {
  switch (mode) {
    case TraversalMode::kTraversedPitch: return "traversed_pitch";
    case TraversalMode::kTraversedRoll: return "traversed_roll";
    case TraversalMode::kStuck: return "stuck";
    case TraversalMode::kFlipped: return "flipped";
    case TraversalMode::kNone: default: return "none";
  }
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::kReachedTarget: return "reached_target";
    case Termination::kTimeout: return "timeout";
    case Termination::kFlipped: return "flipped";
    case Termination::kStopped: return "stopped";
    case Termination::kNone: default: return "none";
  }
}

void finalize_episode(EpisodeLog& log, const WorldConfig& config) {
  log.outcome = classify_mode(log, config);
  log.energy_mJ = energy_cost_mJ(log, config);
}

namespace {

/// One estimation trial: feedforward approach with the oscillation on,
/// stopped shortly after the sensing window fills; then fit the window.
MetricsRow estimation_trial(const WorldConfig& base, double frequency,
                            double amplitude, double sensing_time,
                            bool corrupt_lateral, std::uint64_t seed) {
  WorldConfig cfg = base;
  cfg.oscillation.enabled = true;
  cfg.oscillation.frequency = frequency;
  cfg.oscillation.amplitude = amplitude;
  cfg.delays.sensing_time = sensing_time;
  cfg.delays.delay = std::max(cfg.delays.delay, sensing_time);
  cfg.oscillation.seed = Rng::derive(seed, kOscillationStream);
  cfg.oscillation.vertical =
      make_vertical_oscillation(frequency, cfg.oscillation.seed);
  validate(cfg);
  require_stiffness(cfg);

  MetricsRow row;
  row.seed = seed;

  // Stop once the sensing window is complete (plus one sensor period).
  std::size_t scan = 0;
  double t_detect = -1.0;
  EpisodeOptions options;
  options.stop_when = [&](const StepContext& ctx) {
    const double threshold = ctx.config.sensor.threshold;
    while (t_detect < 0.0 && scan + 1 < ctx.sensor.size()) {
      if (ctx.sensor[scan].force.norm() > threshold &&
          ctx.sensor[scan + 1].force.norm() > threshold)
        t_detect = ctx.sensor[scan].t;
      else
        ++scan;
    }
    return t_detect >= 0.0 &&
           ctx.t >= t_detect + sensing_time + ctx.config.sensor_period();
  };

  const EpisodeLog log = run_episode(cfg, make_feedforward_callback(false), options);

  const std::optional<double> t_c =
      detect_contact(log.sensor_forces(), cfg.sensor.threshold);
  if (!t_c) {
    row.error = "no contact detected";
    return row;
  }
  row.t_c = *t_c;

  // Forces from the sensing window only; poses keep the full recorded
  // series so the estimator's deflection-rate differences have context at
  // the window edges.
  std::vector<ForceSample> forces;
  std::vector<PoseSample> poses;
  for (const SensorSample& s : log.sensor) {
    poses.push_back({s.t, s.pose});
    if (s.t < *t_c || s.t >= *t_c + sensing_time) continue;
    forces.push_back({s.t, s.force});
  }
  if (corrupt_lateral) poses = corrupt_poses(poses, CorruptionMode::kZeroLateral);

  const EstimateResult est =
      estimate_stiffness(forces, poses, cfg, Rng::derive(seed, kEstimatorStream));
  row.k1_hat = est.k1;
  row.k2_hat = est.k2;
  row.err_k1 = std::abs(est.k1 - cfg.beams[0].k) / cfg.beams[0].k;
  row.err_k2 = std::abs(est.k2 - cfg.beams[1].k) / cfg.beams[1].k;
  if (est.insufficient_contact) row.error = "insufficient contact samples";
  return row;
}

/// Strategy/delay trial: full classified episode.
MetricsRow strategy_trial(const WorldConfig& cfg, const std::string& strategy_name,
                          std::uint64_t seed) {
  MetricsRow row;
  row.seed = seed;
  row.strategy = strategy_name;
  StrategyRunResult rr = run_strategy(make_strategy(strategy_name), cfg, seed);
  finalize_episode(rr.log, cfg);
  const EnergySplit split = energy_split(rr.log, cfg);
  row.outcome = to_string(rr.log.outcome);
  row.energy_mJ = split.total();
  row.energy_fx_mJ = split.fx_mJ;
  row.energy_torque_mJ = split.torque_mJ;
  if (rr.log.events.t_c) row.t_c = *rr.log.events.t_c;
  if (rr.log.events.t_s) row.t_s = *rr.log.events.t_s;
  if (rr.estimate) {
    row.k1_hat = rr.estimate->k1;
    row.k2_hat = rr.estimate->k2;
    if (cfg.beams[0].k > 0.0)
      row.err_k1 = std::abs(rr.estimate->k1 - cfg.beams[0].k) / cfg.beams[0].k;
    if (cfg.beams[1].k > 0.0)
      row.err_k2 = std::abs(rr.estimate->k2 - cfg.beams[1].k) / cfg.beams[1].k;
  }
  if (!rr.warnings.empty()) row.error = rr.warnings.front();
  return row;
}

}  // namespace

std::vector<MetricsRow> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty())
    throw std::invalid_argument("sweep: needs at least one cell value");
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");

  std::vector<MetricsRow> rows;
  const auto run_cell = [&](const std::string& cell, double value,
                            const std::function<MetricsRow(std::uint64_t)>& trial_fn) {
    for (int t = 0; t < spec.trials; ++t) {
      const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(t);
      MetricsRow row;
      try {
        row = trial_fn(seed);
      } catch (const std::exception& e) {
        row.seed = seed;
        row.error = e.what();
      }
      row.cell = cell;
      row.value = value;
      row.trial = t;
      rows.push_back(std::move(row));
    }
  };

  switch (spec.variable) {
    case SweepVariable::kFrequency:
      for (double f : spec.values)
        run_cell("f=" + format_value("%g", f) + "Hz", f, [&](std::uint64_t seed) {
          return estimation_trial(spec.base, f, spec.base.oscillation.amplitude,
                                  spec.base.delays.sensing_time,
                                  spec.corrupt_lateral, seed);
        });
      break;
    case SweepVariable::kAmplitude:
      for (double a : spec.values)
        run_cell("A=" + format_value("%g", a * 1000.0) + "mm", a,
                 [&](std::uint64_t seed) {
                   return estimation_trial(spec.base, spec.base.oscillation.frequency,
                                           a, spec.base.delays.sensing_time,
                                           spec.corrupt_lateral, seed);
                 });
      break;
    case SweepVariable::kSensingTime:
      for (double ts : spec.values)
        run_cell("Ts=" + format_value("%g", ts * 1000.0) + "ms", ts,
                 [&](std::uint64_t seed) {
                   return estimation_trial(spec.base, spec.base.oscillation.frequency,
                                           spec.base.oscillation.amplitude, ts,
                                           spec.corrupt_lateral, seed);
                 });
      break;
    case SweepVariable::kDelay:
      for (double d : spec.values)
        run_cell("dt=" + format_value("%g", d * 1000.0) + "ms", d,
                 [&](std::uint64_t seed) {
                   WorldConfig cfg = spec.base;
                   cfg.delays.delay = d;
                   cfg.delays.sensing_time = std::min(cfg.delays.sensing_time, d);
                   return strategy_trial(cfg, "force-feedback", seed);
                 });
      break;
    case SweepVariable::kStrategy:
      for (const char* name : {"ff", "ff-limited", "avoid", "force-feedback"})
        for (double k : spec.values)
          run_cell(std::string(name) + "@k=" + format_value("%g", k), k,
                   [&, name](std::uint64_t seed) {
                     WorldConfig cfg = spec.base;
                     cfg.beams[0].k = k;
                     cfg.beams[1].k = k;
                     return strategy_trial(cfg, name, seed);
                   });
      break;
  }
  return rows;
}

std::vector<CellStats> aggregate_rows(const std::vector<MetricsRow>& rows) {
  std::vector<CellStats> stats;
  const auto find_cell = [&](const std::string& cell) -> CellStats& {
    for (CellStats& s : stats)
      if (s.cell == cell) return s;
    stats.push_back(CellStats{});
    stats.back().cell = cell;
    return stats.back();
  };

  // Two passes: means, then sample variances.
  for (const MetricsRow& r : rows) {
    if (!r.error.empty() && std::isnan(r.k1_hat) && std::isnan(r.energy_mJ)) continue;
    CellStats& s = find_cell(r.cell);
    ++s.n;
    if (!std::isnan(r.err_k1)) s.mean_err_k1 += r.err_k1;
    if (!std::isnan(r.err_k2)) s.mean_err_k2 += r.err_k2;
    if (!std::isnan(r.k1_hat)) s.mean_k1 += r.k1_hat;
    if (!std::isnan(r.k2_hat)) s.mean_k2 += r.k2_hat;
    if (!std::isnan(r.energy_mJ)) s.mean_energy_mJ += r.energy_mJ;
    if (!std::isnan(r.energy_fx_mJ)) s.mean_energy_fx_mJ += r.energy_fx_mJ;
    if (!std::isnan(r.energy_torque_mJ)) s.mean_energy_torque_mJ += r.energy_torque_mJ;
  }
  for (CellStats& s : stats) {
    if (s.n == 0) continue;
    s.mean_err_k1 /= s.n;
    s.mean_err_k2 /= s.n;
    s.mean_k1 /= s.n;
    s.mean_k2 /= s.n;
    s.mean_energy_mJ /= s.n;
    s.mean_energy_fx_mJ /= s.n;
    s.mean_energy_torque_mJ /= s.n;
  }
  for (const MetricsRow& r : rows) {
    if (!r.error.empty() && std::isnan(r.k1_hat) && std::isnan(r.energy_mJ)) continue;
    CellStats& s = find_cell(r.cell);
    if (s.n < 2) continue;
    if (!std::isnan(r.err_k1)) {
      const double d = r.err_k1 - s.mean_err_k1;
      s.var_err_k1 += d * d / (s.n - 1);
    }
    if (!std::isnan(r.err_k2)) {
      const double d = r.err_k2 - s.mean_err_k2;
      s.var_err_k2 += d * d / (s.n - 1);
    }
  }
  return stats;
}

namespace {

struct ReferenceCell {
  const char* cell;
  double e_k1, e_k2;  // fractional reference errors
};

std::string estimation_report(const std::string& title,
                              const std::vector<CellStats>& stats,
                              const std::vector<ReferenceCell>& reference,
                              double tolerance) {
  std::string out = title + "\n";
  out += "cell          ref e_k1  ref e_k2  got e_k1  got e_k2  within " +
         format_value("%.0f", tolerance * 100.0) + "%\n";
  for (const CellStats& s : stats) {
    const ReferenceCell* ref = nullptr;
    for (const ReferenceCell& r : reference)
      if (s.cell == r.cell) ref = &r;
    const bool ok = s.mean_err_k1 < tolerance && s.mean_err_k2 < tolerance;
    char line[160];
    std::snprintf(line, sizeof(line), "%-13s %7.1f%% %9.1f%% %9.1f%% %9.1f%%  %s\n",
                  s.cell.c_str(), ref ? ref->e_k1 * 100.0 : 0.0,
                  ref ? ref->e_k2 * 100.0 : 0.0, s.mean_err_k1 * 100.0,
                  s.mean_err_k2 * 100.0, ok ? "yes" : "NO");
    out += line;
  }
  return out;
}

}  // namespace

ReproduceResult reproduce(const std::string& name, const WorldConfig& base) {
  ReproduceResult result;
  SweepSpec spec;
  spec.base = base;
  spec.seed_base = base.seed;

  const auto set_true_k = [&](double k) {
    spec.base.beams[0].k = k;
    spec.base.beams[1].k = k;
  };

  if (name == "table1" || name == "table2" || name == "table3" || name == "fig6") {
    set_true_k(0.5);
    spec.base.delays.sensing_time = 0.2;
    spec.base.delays.delay = std::max(spec.base.delays.delay, 0.2);
    spec.base.oscillation.frequency = 2.0;
    spec.base.oscillation.amplitude = 0.001;
    spec.trials = 5;
  }

  if (name == "table1") {
    spec.variable = SweepVariable::kFrequency;
    spec.values = {2.0, 4.0, 6.0};
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    result.report = estimation_report(
        "stiffness estimation vs oscillation frequency (A = 1 mm, Ts = 200 ms)",
        result.stats,
        {{"f=2Hz", 0.033, 0.054}, {"f=4Hz", 0.051, 0.043}, {"f=6Hz", 0.047, 0.049}},
        0.10);
  } else if (name == "table2") {
    spec.variable = SweepVariable::kAmplitude;
    spec.values = {0.001, 0.002, 0.003};
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    result.report = estimation_report(
        "stiffness estimation vs oscillation amplitude (f = 2 Hz, Ts = 200 ms)",
        result.stats,
        {{"A=1mm", 0.033, 0.054}, {"A=2mm", 0.036, 0.046}, {"A=3mm", 0.033, 0.046}},
        0.10);
  } else if (name == "table3") {
    spec.variable = SweepVariable::kSensingTime;
    spec.values = {0.025, 0.05, 0.1, 0.2};
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    result.report = estimation_report(
        "stiffness estimation vs sensing time (f = 2 Hz, A = 1 mm)", result.stats,
        {{"Ts=25ms", 0.062, 0.234},
         {"Ts=50ms", 0.026, 0.054},
         {"Ts=100ms", 0.032, 0.018},
         {"Ts=200ms", 0.044, 0.032}},
        1.0);
    result.report +=
        "expected trend: mean error at Ts=25ms exceeds mean error at Ts=100ms\n";
  } else if (name == "fig6") {
    spec.variable = SweepVariable::kAmplitude;
    spec.values = {0.001, 0.002, 0.003};
    spec.corrupt_lateral = true;
    spec.base.oscillation.frequency = 6.0;
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    result.report =
        "estimation with lateral position sensing corrupted to Y = 0 (f = 6 Hz)\n"
        "cell       mean (e_k1+e_k2)/2   reference bound\n";
    for (const CellStats& s : result.stats) {
      const double mean = 0.5 * (s.mean_err_k1 + s.mean_err_k2);
      char line[120];
      std::snprintf(line, sizeof(line), "%-10s %9.1f%%            < 15%%: %s\n",
                    s.cell.c_str(), mean * 100.0, mean < 0.15 ? "yes" : "NO");
      result.report += line;
    }
    result.report += "expected trend: error non-decreasing with amplitude\n";
  } else if (name == "fig8") {
    set_true_k(0.2);
    spec.variable = SweepVariable::kDelay;
    spec.values = {0.32, 0.48, 0.64};
    spec.trials = 1;
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    result.report =
        "force-feedback traversal vs sensorimotor delay (k = 0.2 N·m/rad)\n"
        "cell       energy (mJ)   fore-aft (mJ)   rotation (mJ)   outcome\n";
    for (const MetricsRow& r : result.rows) {
      char line[160];
      std::snprintf(line, sizeof(line), "%-10s %11.2f %15.2f %15.2f   %s\n",
                    r.cell.c_str(), r.energy_mJ, r.energy_fx_mJ, r.energy_torque_mJ,
                    r.outcome.c_str());
      result.report += line;
    }
    result.report += "expected trend: energy non-decreasing with delay\n";
  } else if (name == "strategy-table") {
    spec.variable = SweepVariable::kStrategy;
    spec.values = {0.01, 0.2};
    spec.trials = 1;
    result.rows = run_sweep(spec);
    result.stats = aggregate_rows(result.rows);
    struct StrategyRef {
      const char* cell;
      const char* outcome;
      double energy_mJ;  // < 0: no reference value
    };
    const StrategyRef refs[] = {
        {"ff@k=0.01", "traversed_pitch", 14.8},
        {"ff@k=0.2", "traversed_pitch", 185.2},
        {"ff-limited@k=0.01", "traversed_pitch", -1.0},
        {"ff-limited@k=0.2", "stuck", -1.0},
        {"avoid@k=0.01", "traversed_roll", 35.8},
        {"avoid@k=0.2", "traversed_roll", 35.8},
        {"force-feedback@k=0.01", "traversed_pitch", 15.0},
        {"force-feedback@k=0.2", "traversed_roll", 17.4},
    };
    result.report =
        "strategy comparison (reference outcomes and energies)\n"
        "cell                    expected          got               energy ref   "
        "energy got\n";
    for (const StrategyRef& ref : refs) {
      const MetricsRow* row = nullptr;
      for (const MetricsRow& r : result.rows)
        if (r.cell == ref.cell) row = &r;
      char line[200];
      std::snprintf(line, sizeof(line), "%-23s %-17s %-17s %10s %12.2f\n", ref.cell,
                    ref.outcome, row ? row->outcome.c_str() : "(missing)",
                    ref.energy_mJ > 0.0
                        ? format_value("%.1f", ref.energy_mJ).c_str()
                        : "-",
                    row ? row->energy_mJ : 0.0);
      result.report += line;
    }
  } else {
    throw std::invalid_argument("unknown reproduction name: " + name);
  }
  return result;
}

}  // namespace beamsim
