// beamsim command-line front end: simulate / landscape / plan / estimate /
// sweep / reproduce. Exit codes: 0 success, 2 bad arguments or config,
// 3 runtime failure (I/O, no contact, no feasible plan, ...).
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamsim/config_io.hpp"
#include "beamsim/control.hpp"
#include "beamsim/engine.hpp"
#include "beamsim/estimator.hpp"
#include "beamsim/experiments.hpp"
#include "beamsim/io.hpp"
#include "beamsim/landscape.hpp"
#include "beamsim/params.hpp"
#include "beamsim/planner.hpp"

namespace fs = std::filesystem;
using namespace beamsim;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
};

WorldConfig make_config(const GlobalOpts& g) {
  WorldConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  for (const std::string& assignment : g.overrides) apply_override(cfg, assignment);
  validate(cfg);
  return cfg;
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  return (fs::path(g.out_dir) / name).string();
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = std::min(text.find(',', begin), text.size());
    const std::string item = text.substr(begin, end - begin);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("--values: cannot parse '" + item + "'");
    }
    if (used != item.size())
      throw std::invalid_argument("--values: cannot parse '" + item + "'");
    values.push_back(v);
    begin = end + 1;
    if (end == text.size()) break;
  }
  if (values.empty()) throw std::invalid_argument("--values: empty list");
  return values;
}

double parse_slice_x(const std::string& slice) {
  const std::size_t eq = slice.find('=');
  const std::string key = slice.substr(0, eq == std::string::npos ? slice.size() : eq);
  if (eq == std::string::npos || key != "X")
    throw std::invalid_argument("--slice expects X=<meters>, got '" + slice + "'");
  std::size_t used = 0;
  const std::string value = slice.substr(eq + 1);
  const double x = std::stod(value, &used);
  if (used != value.size())
    throw std::invalid_argument("--slice expects X=<meters>, got '" + slice + "'");
  return x;
}

void print_stats(const std::vector<CellStats>& stats) {
  for (const CellStats& s : stats) {
    std::printf("%-16s n=%d", s.cell.c_str(), s.n);
    if (s.mean_k1 != 0.0 || s.mean_k2 != 0.0)
      std::printf("  k1=%.4f k2=%.4f  err=%.1f%%/%.1f%%", s.mean_k1, s.mean_k2,
                  100.0 * s.mean_err_k1, 100.0 * s.mean_err_k2);
    if (s.mean_energy_mJ != 0.0)
      std::printf("  energy=%.1f mJ (fx %.1f + torque %.1f)", s.mean_energy_mJ,
                  s.mean_energy_fx_mJ, s.mean_energy_torque_mJ);
    std::printf("\n");
  }
}

int run_simulate(const GlobalOpts& g, const std::string& strategy_name, double k1,
                 double k2, std::optional<double> delay_ms,
                 std::optional<std::uint64_t> seed) {
  WorldConfig cfg = make_config(g);
  if (!std::isnan(k1)) cfg.beams[0].k = k1;
  if (!std::isnan(k2)) cfg.beams[1].k = k2;
  if (delay_ms) {
    cfg.delays.delay = *delay_ms / 1000.0;
    cfg.delays.sensing_time = std::min(cfg.delays.sensing_time, cfg.delays.delay);
  }
  validate(cfg);
  require_stiffness(cfg);

  const Strategy strategy = make_strategy(strategy_name);
  StrategyRunResult run = run_strategy(strategy, cfg, seed ? *seed : cfg.seed);
  finalize_episode(run.log, cfg);

  const std::string csv = out_path(g, "episode.csv");
  const std::string json = out_path(g, "summary.json");
  write_episode_csv(run.log, csv);
  write_episode_summary_json(run.log, cfg, &run, json);

  std::printf("strategy=%s outcome=%s termination=%s energy_mJ=%.2f duration_s=%.2f\n",
              strategy.name.c_str(), to_string(run.log.outcome).c_str(),
              to_string(run.log.termination).c_str(), run.log.energy_mJ,
              run.log.duration);
  for (const std::string& w : run.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("wrote %s, %s\n", csv.c_str(), json.c_str());
  return 0;
}

int run_landscape(const GlobalOpts& g, double k1, double k2,
                  std::optional<std::string> slice) {
  if (k1 < 0.0 || k2 < 0.0)
    throw std::invalid_argument("landscape: stiffness must be >= 0");
  const WorldConfig cfg = make_config(g);
  const EnergyLandscape landscape = build_landscape(k1, k2, cfg.grid, cfg);

  const std::string json = out_path(g, "landscape.json");
  const std::string bin = out_path(g, "landscape.bin");
  write_landscape(landscape, json, bin);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t infinite = 0;
  for (double v : landscape.values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } else {
      ++infinite;
    }
  }
  std::printf("grid %dx%dx%d  energy [%.6f, %.6f] J  infinite cells %zu\n",
              landscape.nx(), landscape.na(), landscape.na(), lo, hi, infinite);
  std::printf("wrote %s, %s\n", json.c_str(), bin.c_str());

  if (slice) {
    const double x = parse_slice_x(*slice);
    const std::string slice_csv = out_path(g, "slice.csv");
    write_landscape_slice_csv(landscape, x, slice_csv);
    std::printf("wrote %s\n", slice_csv.c_str());
  }
  return 0;
}

int run_plan(const GlobalOpts& g, const std::string& landscape_path, double x,
             double alpha_deg, double beta_deg) {
  const WorldConfig cfg = make_config(g);
  const EnergyLandscape landscape = read_landscape(landscape_path);
  const Pose start{x, 0.0, cfg.body.H, deg2rad(alpha_deg), deg2rad(beta_deg)};
  const PlannedTrajectory trajectory = plan_path(landscape, start, cfg, 0.0);

  const std::string csv = out_path(g, "plan.csv");
  const std::string json = out_path(g, "plan.json");
  write_plan_csv(trajectory, csv);
  write_plan_json(trajectory, cfg, json);

  std::printf("plan: %zu nodes, uphill cost %.6f J, duration %.2f s\n",
              trajectory.nodes.size(), trajectory.cost,
              trajectory.points.empty()
                  ? 0.0
                  : trajectory.points.back().t - trajectory.points.front().t);
  std::printf("wrote %s, %s\n", csv.c_str(), json.c_str());
  return 0;
}

int run_estimate(const GlobalOpts& g, const std::string& episode_path,
                 std::optional<std::uint64_t> seed, std::optional<double> ts_ms) {
  const WorldConfig cfg = make_config(g);
  const EpisodeSamples raw = read_episode_csv(episode_path);
  const EpisodeSamples samples = resample_to_sensor_rate(raw, cfg.sensor.rate_hz);

  const std::optional<double> t_c = detect_contact(samples.forces, cfg.sensor.threshold);
  if (!t_c) throw std::runtime_error("estimate: no contact detected in the episode");
  const double window = ts_ms ? *ts_ms / 1000.0 : cfg.delays.sensing_time;

  // Forces from the window only; the full pose series stays so the
  // estimator's deflection-rate differences have context at the edges.
  std::vector<ForceSample> forces;
  for (const ForceSample& f : samples.forces)
    if (f.t >= *t_c && f.t < *t_c + window) forces.push_back(f);
  const std::vector<PoseSample>& poses = samples.poses;

  const EstimateResult estimate =
      estimate_stiffness(forces, poses, cfg, seed ? *seed : cfg.seed);
  const std::string json = out_path(g, "estimate.json");
  write_estimate_json(estimate, cfg, json);

  std::printf("t_c=%.4f s window=%.3f s samples=%zu in_contact=%d%s\n", *t_c, window,
              forces.size(), estimate.samples_in_contact,
              estimate.insufficient_contact ? " (insufficient)" : "");
  std::printf("k1_hat=%.6f k2_hat=%.6f residual=%.6g\n", estimate.k1, estimate.k2,
              estimate.residual);
  std::printf("wrote %s\n", json.c_str());
  return 0;
}

int run_sweep_cmd(const GlobalOpts& g, const std::string& kind,
                  const std::string& values, int trials,
                  std::optional<std::uint64_t> seed_base, bool corrupt_lateral) {
  SweepSpec spec;
  if (kind == "frequency") {
    spec.variable = SweepVariable::kFrequency;
  } else if (kind == "amplitude") {
    spec.variable = SweepVariable::kAmplitude;
  } else if (kind == "sensing-time") {
    spec.variable = SweepVariable::kSensingTime;
  } else if (kind == "delay") {
    spec.variable = SweepVariable::kDelay;
  } else if (kind == "strategy") {
    spec.variable = SweepVariable::kStrategy;
  } else {
    throw std::invalid_argument("sweep: unknown kind '" + kind + "'");
  }
  spec.values = parse_value_list(values);
  if (trials < 1) throw std::invalid_argument("sweep: --trials must be >= 1");
  spec.trials = trials;
  spec.corrupt_lateral = corrupt_lateral;
  spec.base = make_config(g);
  spec.seed_base = seed_base ? *seed_base : spec.base.seed;

  const std::vector<MetricsRow> rows = run_sweep(spec);
  const std::vector<CellStats> stats = aggregate_rows(rows);
  const std::string rows_csv = out_path(g, "sweep.csv");
  const std::string stats_csv = out_path(g, "sweep_stats.csv");
  write_sweep_csv(rows, rows_csv);
  write_cell_stats_csv(stats, stats_csv);

  print_stats(stats);
  for (const MetricsRow& r : rows)
    if (!r.error.empty())
      std::printf("trial error: %s trial %d: %s\n", r.cell.c_str(), r.trial,
                  r.error.c_str());
  std::printf("wrote %s, %s\n", rows_csv.c_str(), stats_csv.c_str());
  return 0;
}

int run_reproduce(const GlobalOpts& g, const std::string& name) {
  const WorldConfig cfg = make_config(g);
  const ReproduceResult result = reproduce(name, cfg);

  const std::string rows_csv = out_path(g, name + ".csv");
  const std::string stats_csv = out_path(g, name + "_stats.csv");
  const std::string report_txt = out_path(g, "report.txt");
  write_sweep_csv(result.rows, rows_csv);
  write_cell_stats_csv(result.stats, stats_csv);
  {
    std::ofstream out(report_txt);
    if (!out) throw std::runtime_error("cannot write " + report_txt);
    out << result.report;
  }
  std::fputs(result.report.c_str(), stdout);
  std::printf("wrote %s, %s, %s\n", rows_csv.c_str(), stats_csv.c_str(),
              report_txt.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beamsim: ellipsoid robot vs torsion-sprung beams - simulation, "
               "stiffness estimation, energy-landscape planning"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file (key = value lines)");
  app.add_option("--set", g.overrides, "config override key=value (repeatable)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one episode under a strategy");
  sim->fallthrough();
  std::string strategy_name;
  double sim_k1 = std::nan(""), sim_k2 = std::nan("");
  double delay_ms = 0.0;
  std::uint64_t seed = 0;
  sim->add_option("--strategy", strategy_name,
                  "ff | ff-limited | avoid | force-feedback")
      ->required();
  sim->add_option("--k1", sim_k1, "beam 1 stiffness (N*m/rad)");
  sim->add_option("--k2", sim_k2, "beam 2 stiffness (N*m/rad)");
  auto* sim_delay = sim->add_option("--delay-ms", delay_ms, "sensorimotor delay (ms)");
  auto* sim_seed = sim->add_option("--seed", seed, "episode seed");

  // landscape
  auto* land = app.add_subcommand("landscape", "tabulate potential energy over "
                                               "(X, alpha, beta)");
  land->fallthrough();
  double land_k1 = 0.0, land_k2 = 0.0;
  std::string slice;
  land->add_option("--k1", land_k1, "beam 1 stiffness (N*m/rad)")->required();
  land->add_option("--k2", land_k2, "beam 2 stiffness (N*m/rad)")->required();
  auto* land_slice = land->add_option("--slice", slice, "also export one X slice "
                                                        "as CSV, e.g. X=0");

  // plan
  auto* plan = app.add_subcommand("plan", "A* minimum-uphill path over a saved "
                                          "landscape");
  plan->fallthrough();
  std::string landscape_path;
  double plan_x = -0.12, plan_alpha = 0.0, plan_beta = 0.0;
  plan->add_option("--landscape", landscape_path, "landscape JSON from the "
                                                  "landscape command")
      ->required();
  plan->add_option("--x", plan_x, "start X (m)")->capture_default_str();
  plan->add_option("--alpha-deg", plan_alpha, "start roll (deg)")->capture_default_str();
  plan->add_option("--beta-deg", plan_beta, "start pitch (deg)")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "fit beam stiffness from a recorded "
                                             "episode CSV");
  est->fallthrough();
  std::string episode_path;
  std::uint64_t est_seed = 0;
  double ts_ms = 0.0;
  est->add_option("--episode", episode_path, "episode CSV from simulate")->required();
  auto* est_seed_opt = est->add_option("--seed", est_seed, "estimator restart seed");
  auto* est_ts = est->add_option("--ts-ms", ts_ms, "force-collection window (ms)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a study over one variable");
  sweep->fallthrough();
  std::string kind, values;
  int trials = 5;
  std::uint64_t seed_base = 0;
  bool corrupt_lateral = false;
  sweep->add_option("--kind", kind,
                    "frequency | amplitude | sensing-time | delay | strategy")
      ->required();
  sweep->add_option("--values", values, "comma-separated cell values")->required();
  sweep->add_option("--trials", trials, "trials per cell")->capture_default_str();
  auto* sweep_seed = sweep->add_option("--seed-base", seed_base,
                                       "first trial seed (default: config seed)");
  sweep->add_flag("--corrupt-lateral", corrupt_lateral,
                  "zero the lateral pose channel before estimating");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "run a canned study and print a "
                                                "reference-vs-obtained report");
  repro->fallthrough();
  std::string name;
  repro->add_option("--name", name,
                    "table1 | table2 | table3 | fig6 | fig8 | strategy-table")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::create_directories(g.out_dir);
    if (sim->parsed())
      return run_simulate(g, strategy_name, sim_k1, sim_k2,
                          sim_delay->count() ? std::optional<double>(delay_ms)
                                             : std::nullopt,
                          sim_seed->count() ? std::optional<std::uint64_t>(seed)
                                            : std::nullopt);
    if (land->parsed())
      return run_landscape(g, land_k1, land_k2,
                           land_slice->count() ? std::optional<std::string>(slice)
                                               : std::nullopt);
    if (plan->parsed()) return run_plan(g, landscape_path, plan_x, plan_alpha, plan_beta);
    if (est->parsed())
      return run_estimate(g, episode_path,
                          est_seed_opt->count() ? std::optional<std::uint64_t>(est_seed)
                                                : std::nullopt,
                          est_ts->count() ? std::optional<double>(ts_ms) : std::nullopt);
    if (sweep->parsed())
      return run_sweep_cmd(g, kind, values, trials,
                           sweep_seed->count() ? std::optional<std::uint64_t>(seed_base)
                                               : std::nullopt,
                           corrupt_lateral);
    if (repro->parsed()) return run_reproduce(g, name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
