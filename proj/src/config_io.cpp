#include "beamsim/config_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beamsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "unset") return std::nan("");
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": '" + v + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  return x;
}

// Round-trip exact double formatting.
std::string fmt(double x) {
  if (std::isnan(x)) return "unset";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  // prefer the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char s[40];
    std::snprintf(s, sizeof(s), "%.*g", prec, x);
    if (std::stod(s) == x) return s;
  }
  return buf;
}

void set_key(WorldConfig& c, const std::string& key, const std::string& val) {
  auto d = [&] { return parse_double(key, val); };

  if (key == "g") c.g = d();
  else if (key == "seed") c.seed = parse_u64(key, val);
  else if (key == "body.mass") c.body.mass = d();
  else if (key == "body.a") c.body.a = d();
  else if (key == "body.b") c.body.b = d();
  else if (key == "body.c") c.body.c = d();
  else if (key == "body.h_c") c.body.h_c = d();
  else if (key == "body.H") c.body.H = d();
  else if (key == "body.I1") c.body.inertia[0] = d();
  else if (key == "body.I2") c.body.inertia[1] = d();
  else if (key == "body.I3") c.body.inertia[2] = d();
  else if (key == "gap") c.gap = d();
  else if (key == "v_x") c.v_x = d();
  else if (key == "dt_control") c.dt_control = d();
  else if (key == "dt_physics") c.dt_physics = d();
  else if (key == "x_start") c.x_start = d();
  else if (key == "x_target") c.x_target = d();
  else if (key == "contact.k_n") c.contact.k_n = d();
  else if (key == "contact.c_n") c.contact.c_n = d();
  else if (key == "limits.f_x_max") c.limits.f_x_max = d();
  else if (key == "limits.tau1_max") c.limits.tau1_max = d();
  else if (key == "limits.tau2_max") c.limits.tau2_max = d();
  else if (key == "sensor.rate_hz") c.sensor.rate_hz = d();
  else if (key == "sensor.threshold") c.sensor.threshold = d();
  else if (key == "delays.sensing_time") c.delays.sensing_time = d();
  else if (key == "delays.delay") c.delays.delay = d();
  else if (key == "oscillation.enabled") c.oscillation.enabled = parse_bool(key, val);
  else if (key == "oscillation.frequency") c.oscillation.frequency = d();
  else if (key == "oscillation.amplitude") c.oscillation.amplitude = d();
  else if (key == "oscillation.seed") c.oscillation.seed = parse_u64(key, val);
  else if (key == "control.velocity_gain") c.control.velocity_gain = d();
  else if (key == "control.kp_x") c.control.kp_x = d();
  else if (key == "control.kd_x") c.control.kd_x = d();
  else if (key == "control.kp_ang") c.control.kp_ang = d();
  else if (key == "control.kd_ang") c.control.kd_ang = d();
  else if (key == "control.ref_smooth_time") c.control.ref_smooth_time = d();
  else if (key == "planner.rotation_rate") c.planner.rotation_rate = d();
  else if (key == "classify.roll_threshold_deg") c.classify.roll_threshold = deg2rad(d());
  else if (key == "classify.stuck_x") c.classify.stuck_x = d();
  else if (key == "classify.timeout") c.classify.timeout = d();
  else if (key == "grid.x_min") c.grid.x_min = d();
  else if (key == "grid.x_max") c.grid.x_max = d();
  else if (key == "grid.x_step") c.grid.x_step = d();
  else if (key == "grid.ang_min_deg") c.grid.ang_min = deg2rad(d());
  else if (key == "grid.ang_max_deg") c.grid.ang_max = deg2rad(d());
  else if (key == "grid.ang_step_deg") c.grid.ang_step = deg2rad(d());
  else {
    // beam fields and explicit vertical components
    for (int i = 0; i < 2; ++i) {
      const std::string p = "beams." + std::to_string(i) + ".";
      if (key == p + "k") { c.beams[i].k = d(); return; }
      if (key == p + "c_d") { c.beams[i].c_d = d(); return; }
      if (key == p + "mass") { c.beams[i].mass = d(); return; }
      if (key == p + "length") { c.beams[i].length = d(); return; }
      if (key == p + "width") { c.beams[i].width = d(); return; }
      if (key == p + "thickness") { c.beams[i].thickness = d(); return; }
      if (key == p + "y_hinge") { c.beams[i].y_hinge = d(); return; }
    }
    if (key.rfind("oscillation.vertical.", 0) == 0) {
      const std::size_t idx = std::stoul(key.substr(21));
      std::istringstream iss(val);
      SineComponent comp;
      char c1 = 0, c2 = 0;
      if (!(iss >> comp.amplitude >> c1 >> comp.frequency >> c2 >> comp.phase) ||
          c1 != ',' || c2 != ',')
        throw std::invalid_argument("config: bad component for " + key);
      if (c.oscillation.vertical.size() <= idx) c.oscillation.vertical.resize(idx + 1);
      c.oscillation.vertical[idx] = comp;
      return;
    }
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

}  // namespace

WorldConfig parse_config(const std::string& text) {
  WorldConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(config);
  return config;
}

WorldConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const WorldConfig& c) {
  std::ostringstream o;
  o << "# world configuration (SI units; *_deg keys in degrees)\n";
  o << "g = " << fmt(c.g) << "  # m/s^2\n";
  o << "seed = " << c.seed << "\n";
  o << "\n# body: ellipsoid on the 3-DoF carriage\n";
  o << "body.mass = " << fmt(c.body.mass) << "  # kg\n";
  o << "body.a = " << fmt(c.body.a) << "  # m fore-aft semi-axis\n";
  o << "body.b = " << fmt(c.body.b) << "  # m lateral semi-axis\n";
  o << "body.c = " << fmt(c.body.c) << "  # m vertical semi-axis\n";
  o << "body.h_c = " << fmt(c.body.h_c) << "  # m CoM offset below center\n";
  o << "body.H = " << fmt(c.body.H) << "  # m rotation-center height\n";
  o << "body.I1 = " << fmt(c.body.inertia[0]) << "  # kg m^2 roll\n";
  o << "body.I2 = " << fmt(c.body.inertia[1]) << "  # kg m^2 pitch\n";
  o << "body.I3 = " << fmt(c.body.inertia[2]) << "  # kg m^2 yaw\n";
  o << "\n# beams: torsion-spring plates hinged at the ground\n";
  o << "gap = " << fmt(c.gap) << "  # m between inner edges\n";
  for (int i = 0; i < 2; ++i) {
    const std::string p = "beams." + std::to_string(i) + ".";
    o << p << "k = " << fmt(c.beams[i].k) << "  # N m/rad ('unset' until chosen)\n";
    o << p << "c_d = " << fmt(c.beams[i].c_d) << "  # N m s/rad\n";
    o << p << "mass = " << fmt(c.beams[i].mass) << "  # kg\n";
    o << p << "length = " << fmt(c.beams[i].length) << "  # m\n";
    o << p << "width = " << fmt(c.beams[i].width) << "  # m\n";
    o << p << "thickness = " << fmt(c.beams[i].thickness) << "  # m\n";
    o << p << "y_hinge = " << fmt(c.beams[i].y_hinge) << "  # m\n";
  }
  o << "\n# kinematics and stepping\n";
  o << "v_x = " << fmt(c.v_x) << "  # m/s\n";
  o << "dt_control = " << fmt(c.dt_control) << "  # s\n";
  o << "dt_physics = " << fmt(c.dt_physics) << "  # s\n";
  o << "x_start = " << fmt(c.x_start) << "  # m\n";
  o << "x_target = " << fmt(c.x_target) << "  # m\n";
  o << "\ncontact.k_n = " << fmt(c.contact.k_n) << "  # N/m\n";
  o << "contact.c_n = " << fmt(c.contact.c_n) << "  # N s/m\n";
  o << "\nlimits.f_x_max = " << fmt(c.limits.f_x_max) << "  # N\n";
  o << "limits.tau1_max = " << fmt(c.limits.tau1_max) << "  # N m\n";
  o << "limits.tau2_max = " << fmt(c.limits.tau2_max) << "  # N m\n";
  o << "\nsensor.rate_hz = " << fmt(c.sensor.rate_hz) << "  # Hz\n";
  o << "sensor.threshold = " << fmt(c.sensor.threshold) << "  # N\n";
  o << "\ndelays.sensing_time = " << fmt(c.delays.sensing_time) << "  # s (T_s)\n";
  o << "delays.delay = " << fmt(c.delays.delay) << "  # s contact->tracking\n";
  o << "\noscillation.enabled = " << (c.oscillation.enabled ? "true" : "false") << "\n";
  o << "oscillation.frequency = " << fmt(c.oscillation.frequency) << "  # Hz\n";
  o << "oscillation.amplitude = " << fmt(c.oscillation.amplitude) << "  # m\n";
  o << "oscillation.seed = " << c.oscillation.seed << "\n";
  for (std::size_t i = 0; i < c.oscillation.vertical.size(); ++i) {
    const auto& s = c.oscillation.vertical[i];
    o << "oscillation.vertical." << i << " = " << fmt(s.amplitude) << ", "
      << fmt(s.frequency) << ", " << fmt(s.phase) << "  # m, Hz, rad\n";
  }
  o << "\ncontrol.velocity_gain = " << fmt(c.control.velocity_gain) << "  # N s/m\n";
  o << "control.kp_x = " << fmt(c.control.kp_x) << "  # N/m\n";
  o << "control.kd_x = " << fmt(c.control.kd_x) << "  # N s/m\n";
  o << "control.kp_ang = " << fmt(c.control.kp_ang) << "  # N m/rad\n";
  o << "control.kd_ang = " << fmt(c.control.kd_ang) << "  # N m s/rad\n";
  o << "control.ref_smooth_time = " << fmt(c.control.ref_smooth_time) << "  # s\n";
  o << "\nplanner.rotation_rate = " << fmt(c.planner.rotation_rate) << "  # rad/s\n";
  o << "\nclassify.roll_threshold_deg = " << fmt(rad2deg(c.classify.roll_threshold)) << "\n";
  o << "classify.stuck_x = " << fmt(c.classify.stuck_x) << "  # m\n";
  o << "classify.timeout = " << fmt(c.classify.timeout) << "  # s\n";
  o << "\ngrid.x_min = " << fmt(c.grid.x_min) << "  # m\n";
  o << "grid.x_max = " << fmt(c.grid.x_max) << "  # m\n";
  o << "grid.x_step = " << fmt(c.grid.x_step) << "  # m\n";
  o << "grid.ang_min_deg = " << fmt(rad2deg(c.grid.ang_min)) << "\n";
  o << "grid.ang_max_deg = " << fmt(rad2deg(c.grid.ang_max)) << "\n";
  o << "grid.ang_step_deg = " << fmt(rad2deg(c.grid.ang_step)) << "\n";
  return o.str();
}

void apply_override(WorldConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be key=value: '" + assignment + "'");
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string config_hash(const WorldConfig& config) {
  const std::string s = serialize_config(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) { return fmt(x); }

}  // namespace beamsim
