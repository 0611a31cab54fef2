#include "beamsim/io.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "beamsim/config_io.hpp"

namespace beamsim {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string num(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

/// JSON-safe number: NaN/inf are not valid JSON, map to null.
json jnum(double x) {
  if (std::isnan(x) || std::isinf(x)) return nullptr;
  return x;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

void write_episode_csv(const EpisodeLog& log, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# schema: episode/1\n";
  out << "t,X,Y,Z,alpha,beta,theta1,theta2,"
         "Fx_sensed,Fy_sensed,Fz_sensed,u_Fx,u_t1,u_t2\n";
  for (const LogRow& r : log.rows) {
    const Pose& p = r.state.pose;
    out << num(r.t) << ',' << num(p.X) << ',' << num(p.Y) << ',' << num(p.Z) << ','
        << num(p.alpha) << ',' << num(p.beta) << ',' << num(r.beams[0].theta) << ','
        << num(r.beams[1].theta) << ',' << num(r.force_sensed.x()) << ','
        << num(r.force_sensed.y()) << ',' << num(r.force_sensed.z()) << ','
        << num(r.u.f_x) << ',' << num(r.u.tau1) << ',' << num(r.u.tau2) << '\n';
  }
}

void write_episode_summary_json(const EpisodeLog& log, const WorldConfig& config,
                                const StrategyRunResult* run, const std::string& path) {
  double max_pitch = 0.0, max_roll = 0.0;
  for (const LogRow& r : log.rows) {
    max_pitch = std::max(max_pitch, std::abs(r.state.pose.beta));
    max_roll = std::max(max_roll, std::abs(r.state.pose.alpha));
  }
  const EnergySplit split = energy_split(log, config);
  json j{
      {"schema", "episode-summary/1"},
      {"outcome", to_string(log.outcome)},
      {"termination", to_string(log.termination)},
      {"energy_mJ", split.total()},
      {"energy_fx_mJ", split.fx_mJ},
      {"energy_torque_mJ", split.torque_mJ},
      {"t_c", log.events.t_c ? json(*log.events.t_c) : json(nullptr)},
      {"t_s", log.events.t_s ? json(*log.events.t_s) : json(nullptr)},
      {"max_pitch_deg", rad2deg(max_pitch)},
      {"max_roll_deg", rad2deg(max_roll)},
      {"duration_s", log.duration},
      {"final_x", log.final_state.pose.X},
      {"max_penetration_m", log.max_penetration},
      {"config_hash", config_hash(config)},
  };
  if (run) {
    j["fell_back_to_feedforward"] = run->fell_back_to_feedforward;
    j["warnings"] = run->warnings;
    if (run->estimate) {
      j["k1_hat"] = run->estimate->k1;
      j["k2_hat"] = run->estimate->k2;
      j["estimate_residual"] = run->estimate->residual;
    }
    if (run->plan) {
      j["plan_cost_J"] = run->plan->cost;
      j["plan_nodes"] = run->plan->nodes.size();
    }
  }
  open_out(path) << j.dump(2) << '\n';
}

EpisodeSamples read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error(path + ": missing column " + name);
  };
  const std::size_t ct = column("t"), cx = column("X"), cy = column("Y"),
                    cz = column("Z"), ca = column("alpha"), cb = column("beta"),
                    cfx = column("Fx_sensed"), cfy = column("Fy_sensed"),
                    cfz = column("Fz_sensed");

  EpisodeSamples samples;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < header.size())
      throw std::runtime_error(path + ": short row: '" + line + "'");
    const auto d = [&](std::size_t i) { return std::stod(f[i]); };
    const double t = d(ct);
    samples.poses.push_back(
        {t, Pose{d(cx), d(cy), d(cz), d(ca), d(cb)}});
    samples.forces.push_back({t, Vec3(d(cfx), d(cfy), d(cfz))});
  }
  return samples;
}

EpisodeSamples resample_to_sensor_rate(const EpisodeSamples& samples, double rate_hz) {
  EpisodeSamples out;
  if (samples.poses.empty()) return out;
  const double period = 1.0 / rate_hz;
  const double t_end = samples.poses.back().t;
  std::size_t row = 0;
  for (int tick = 0;; ++tick) {
    const double t = tick * period;
    if (t > t_end + 0.5 * period) break;
    while (row + 1 < samples.poses.size() &&
           std::abs(samples.poses[row + 1].t - t) <= std::abs(samples.poses[row].t - t))
      ++row;
    out.poses.push_back(samples.poses[row]);
    out.forces.push_back(samples.forces[row]);
  }
  return out;
}

void write_landscape(const EnergyLandscape& landscape, const std::string& json_path,
                     const std::string& bin_path) {
  {
    std::ofstream bin = open_out(bin_path);
    static_assert(sizeof(double) == 8);
    bin.write(reinterpret_cast<const char*>(landscape.values.data()),
              static_cast<std::streamsize>(landscape.values.size() * sizeof(double)));
  }
  double finite_min = std::numeric_limits<double>::infinity();
  double finite_max = -std::numeric_limits<double>::infinity();
  std::size_t infinite = 0;
  for (double v : landscape.values) {
    if (std::isfinite(v)) {
      finite_min = std::min(finite_min, v);
      finite_max = std::max(finite_max, v);
    } else {
      ++infinite;
    }
  }
  const GridSpec& s = landscape.spec;
  const json j{
      {"schema", "landscape/1"},
      {"k1", landscape.k1},
      {"k2", landscape.k2},
      {"grid",
       {{"x_min", s.x_min},
        {"x_max", s.x_max},
        {"x_step", s.x_step},
        {"ang_min", s.ang_min},
        {"ang_max", s.ang_max},
        {"ang_step", s.ang_step},
        {"nx", s.nx()},
        {"na", s.na()}}},
      {"layout", "x-major"},
      {"flat_index", "(ix*na + ia)*na + ib"},
      {"dtype", "float64"},
      {"byte_order", "little-endian"},
      {"count", landscape.values.size()},
      {"data_file", std::filesystem::path(bin_path).filename().string()},
      {"energy_min_J", jnum(finite_min)},
      {"energy_max_J", jnum(finite_max)},
      {"infinite_cells", infinite},
  };
  open_out(json_path) << j.dump(2) << '\n';
}

EnergyLandscape read_landscape(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot read " + json_path);
  json j;
  in >> j;
  EnergyLandscape landscape;
  landscape.k1 = j.at("k1").get<double>();
  landscape.k2 = j.at("k2").get<double>();
  const json& g = j.at("grid");
  landscape.spec.x_min = g.at("x_min").get<double>();
  landscape.spec.x_max = g.at("x_max").get<double>();
  landscape.spec.x_step = g.at("x_step").get<double>();
  landscape.spec.ang_min = g.at("ang_min").get<double>();
  landscape.spec.ang_max = g.at("ang_max").get<double>();
  landscape.spec.ang_step = g.at("ang_step").get<double>();

  const std::size_t count = j.at("count").get<std::size_t>();
  const std::size_t expected = static_cast<std::size_t>(landscape.nx()) *
                               landscape.na() * landscape.na();
  if (count != expected)
    throw std::runtime_error(json_path + ": count does not match the grid");

  const std::filesystem::path bin_path =
      std::filesystem::path(json_path).parent_path() /
      j.at("data_file").get<std::string>();
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + bin_path.string());
  landscape.values.resize(count);
  bin.read(reinterpret_cast<char*>(landscape.values.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(bin.gcount()) != count * sizeof(double))
    throw std::runtime_error(bin_path.string() + ": truncated data");
  return landscape;
}

void write_landscape_slice_csv(const EnergyLandscape& landscape, double x,
                               const std::string& path) {
  std::ofstream out = open_out(path);
  const int ix = landscape.nearest_x(x);
  out << "# schema: landscape-slice/1\n";
  out << "# X = " << num(landscape.x_of(ix)) << " (nearest grid point to "
      << num(x) << ")\n";
  out << "alpha_deg";
  for (int ib = 0; ib < landscape.na(); ++ib)
    out << ",beta_" << num(rad2deg(landscape.beta_of(ib)));
  out << '\n';
  for (int ia = 0; ia < landscape.na(); ++ia) {
    out << num(rad2deg(landscape.alpha_of(ia)));
    for (int ib = 0; ib < landscape.na(); ++ib)
      out << ',' << num(landscape.at(ix, ia, ib));
    out << '\n';
  }
}

void write_plan_csv(const PlannedTrajectory& trajectory, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# schema: plan/1\n";
  out << "t,X_ref,alpha_ref,beta_ref\n";
  for (const TrajectoryPoint& p : trajectory.points)
    out << num(p.t) << ',' << num(p.x) << ',' << num(p.alpha) << ',' << num(p.beta)
        << '\n';
}

void write_plan_json(const PlannedTrajectory& trajectory, const WorldConfig& config,
                     const std::string& path) {
  const json j{
      {"schema", "plan/1"},
      {"cost_J", trajectory.cost},
      {"nodes", trajectory.nodes.size()},
      {"t_start", trajectory.points.empty() ? 0.0 : trajectory.points.front().t},
      {"t_end", trajectory.points.empty() ? 0.0 : trajectory.points.back().t},
      {"v_x", config.v_x},
      {"rotation_rate", config.planner.rotation_rate},
      {"config_hash", config_hash(config)},
  };
  open_out(path) << j.dump(2) << '\n';
}

void write_estimate_json(const EstimateResult& estimate, const WorldConfig& config,
                         const std::string& path) {
  const json j{
      {"schema", "estimate/1"},
      {"k1_hat", estimate.k1},
      {"k2_hat", estimate.k2},
      {"residual", estimate.residual},
      {"samples_in_contact", estimate.samples_in_contact},
      {"insufficient_contact", estimate.insufficient_contact},
      {"restarts", estimate.restarts},
      {"best_restart", estimate.best_restart},
      {"config_hash", config_hash(config)},
  };
  open_out(path) << j.dump(2) << '\n';
}

void write_sweep_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# schema: sweep/1\n";
  out << "cell,value,strategy,trial,seed,outcome,energy_mJ,energy_fx_mJ,"
         "energy_torque_mJ,k1_hat,k2_hat,err_k1,err_k2,t_c,t_s,error\n";
  for (const MetricsRow& r : rows) {
    out << r.cell << ',' << num(r.value) << ',' << r.strategy << ',' << r.trial << ','
        << r.seed << ',' << r.outcome << ',' << num(r.energy_mJ) << ','
        << num(r.energy_fx_mJ) << ',' << num(r.energy_torque_mJ) << ','
        << num(r.k1_hat) << ',' << num(r.k2_hat) << ',' << num(r.err_k1) << ','
        << num(r.err_k2) << ',' << num(r.t_c) << ',' << num(r.t_s) << ','
        << r.error << '\n';
  }
}

void write_cell_stats_csv(const std::vector<CellStats>& stats, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# schema: sweep-stats/1\n";
  out << "cell,n,mean_err_k1,mean_err_k2,var_err_k1,var_err_k2,mean_k1,mean_k2,"
         "mean_energy_mJ,mean_energy_fx_mJ,mean_energy_torque_mJ\n";
  for (const CellStats& s : stats) {
    out << s.cell << ',' << s.n << ',' << num(s.mean_err_k1) << ','
        << num(s.mean_err_k2) << ',' << num(s.var_err_k1) << ',' << num(s.var_err_k2)
        << ',' << num(s.mean_k1) << ',' << num(s.mean_k2) << ','
        << num(s.mean_energy_mJ) << ',' << num(s.mean_energy_fx_mJ) << ','
        << num(s.mean_energy_torque_mJ) << '\n';
  }
}

}  // namespace beamsim
