#include "beamsim/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "beamsim/rng.hpp"

namespace beamsim {
namespace {

void fail(const std::string& field, const std::string& rule) {
  throw std::invalid_argument("config: " + field + " " + rule);
}

void check_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive and finite");
}

// True when b is an integer multiple of a (relative tolerance on the ratio).
bool divides(double a, double b) {
  const double ratio = b / a;
  return std::abs(ratio - std::lround(ratio)) < 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

std::vector<SineComponent> make_vertical_oscillation(double frequency, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x0501));
  std::vector<SineComponent> out(30);
  for (int i = 0; i < 30; ++i) {
    out[i].amplitude = rng.uniform(-0.0005, 0.0005);
    out[i].frequency = (i + 1) * frequency / 50.0;
    out[i].phase = rng.uniform(0.0, 2.0 * kPi);
  }
  return out;
}

void validate(WorldConfig& config) {
  check_positive(config.g, "g");
  check_positive(config.body.mass, "body.mass");
  check_positive(config.body.a, "body.a");
  check_positive(config.body.b, "body.b");
  check_positive(config.body.c, "body.c");
  check_positive(config.body.H, "body.H");
  if (config.body.h_c < 0.0) fail("body.h_c", "must be >= 0");
  for (int i = 0; i < 3; ++i) check_positive(config.body.inertia[i], "body.inertia");

  for (int i = 0; i < 2; ++i) {
    const auto& beam = config.beams[i];
    const std::string p = "beams." + std::to_string(i) + ".";
    if (beam.stiffness_set() && beam.k < 0.0) fail(p + "k", "must be >= 0");
    if (beam.c_d < 0.0) fail(p + "c_d", "must be >= 0");
    check_positive(beam.mass, (p + "mass").c_str());
    check_positive(beam.length, (p + "length").c_str());
    check_positive(beam.width, (p + "width").c_str());
    check_positive(beam.thickness, (p + "thickness").c_str());
  }
  if (config.beams[0].y_hinge >= config.beams[1].y_hinge)
    fail("beams.y_hinge", "beam 0 must lie at lower Y than beam 1");
  check_positive(config.gap, "gap");

  check_positive(config.v_x, "v_x");
  check_positive(config.dt_control, "dt_control");
  check_positive(config.dt_physics, "dt_physics");
  if (!divides(config.dt_physics, config.dt_control))
    fail("dt_control", "must be an integer multiple of dt_physics");
  if (config.x_start >= config.x_target) fail("x_start", "must be < x_target");

  check_positive(config.contact.k_n, "contact.k_n");
  if (config.contact.c_n < 0.0) fail("contact.c_n", "must be >= 0");

  check_positive(config.limits.f_x_max, "limits.f_x_max");
  check_positive(config.limits.tau1_max, "limits.tau1_max");
  check_positive(config.limits.tau2_max, "limits.tau2_max");

  check_positive(config.sensor.rate_hz, "sensor.rate_hz");
  if (config.sensor.threshold < 0.0) fail("sensor.threshold", "must be >= 0");
  // The sampler records at exact physics substeps, so the period must land
  // on the substep grid (the control grid does not divide 25 ms at defaults).
  if (!divides(config.dt_physics, config.sensor_period()))
    fail("sensor.rate_hz", "period must be an integer multiple of dt_physics");

  check_positive(config.delays.sensing_time, "delays.sensing_time");
  if (config.delays.delay < config.delays.sensing_time)
    fail("delays.delay", "must be >= delays.sensing_time");

  check_positive(config.control.velocity_gain, "control.velocity_gain");
  check_positive(config.control.kp_x, "control.kp_x");
  if (config.control.kd_x < 0.0) fail("control.kd_x", "must be >= 0");
  check_positive(config.control.kp_ang, "control.kp_ang");
  if (config.control.kd_ang < 0.0) fail("control.kd_ang", "must be >= 0");

  check_positive(config.planner.rotation_rate, "planner.rotation_rate");
  check_positive(config.classify.timeout, "classify.timeout");
  if (config.classify.roll_threshold <= 0.0) fail("classify.roll_threshold", "must be > 0");

  check_positive(config.grid.x_step, "grid.x_step");
  check_positive(config.grid.ang_step, "grid.ang_step");
  if (config.grid.x_min >= config.grid.x_max) fail("grid.x_min", "must be < grid.x_max");
  if (config.grid.ang_min >= config.grid.ang_max) fail("grid.ang_min", "must be < grid.ang_max");

  if (config.oscillation.enabled) {
    check_positive(config.oscillation.frequency, "oscillation.frequency");
    if (config.oscillation.amplitude < 0.0) fail("oscillation.amplitude", "must be >= 0");
    if (config.oscillation.vertical.empty())
      config.oscillation.vertical =
          make_vertical_oscillation(config.oscillation.frequency, config.oscillation.seed);
  }
}

void require_stiffness(const WorldConfig& config) {
  for (int i = 0; i < 2; ++i)
    if (!config.beams[i].stiffness_set())
      fail("beams." + std::to_string(i) + ".k", "is required for this operation");
}

}  // namespace beamsim
