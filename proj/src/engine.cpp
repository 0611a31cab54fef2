#include "beamsim/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "beamsim/rng.hpp"

namespace beamsim {

std::vector<ForceSample> EpisodeLog::sensor_forces() const {
  std::vector<ForceSample> out;
  out.reserve(sensor.size());
  for (const auto& s : sensor) out.push_back({s.t, s.force});
  return out;
}

std::vector<PoseSample> EpisodeLog::sensor_poses() const {
  std::vector<PoseSample> out;
  out.reserve(sensor.size());
  for (const auto& s : sensor) out.push_back({s.t, s.pose});
  return out;
}

std::array<BeamContact, 2> penalty_contact(const RobotState& state,
                                           const std::array<BeamState, 2>& beams,
                                           const WorldConfig& config) {
  std::array<BeamContact, 2> out;
  const Vec3 center = state.pose.center();
  // Body angular velocity: roll about world X, pitch about the rolled body-y.
  const double ca = std::cos(state.pose.alpha), sa = std::sin(state.pose.alpha);
  const Vec3 y_rolled(0.0, ca, sa);
  const Vec3 omega_body = state.alpha_dot * Vec3::UnitX() + state.beta_dot * y_rolled;
  const Vec3 v_center(state.v_x, state.v_y, state.v_z);

  for (int i = 0; i < 2; ++i) {
    const BeamParams& beam = config.beams[i];
    const ClearanceResult res =
        ellipsoid_beam_clearance(state.pose, beams[i].theta, beam, config.body, BeamShape::kBox);
    BeamContact& c = out[i];
    c.patch = res.patch;
    if (res.clearance >= 0.0) continue;

    const double depth = -res.clearance;
    const Vec3& n = res.patch.normal;  // outward from the beam, into the body
    const Vec3& p = res.patch.point;
    // Material-point velocities at the contact: body rotates about its
    // center and translates; the beam rotates about its hinge line (+Y).
    const Vec3 v_body_pt = v_center + omega_body.cross(p - center);
    const Vec3 hinge(0.0, beam.y_hinge, 0.0);
    const Vec3 v_beam_pt = beams[i].omega * Vec3::UnitY().cross(p - hinge);
    const double depth_rate = n.dot(v_body_pt - v_beam_pt);

    const double f = config.contact.k_n * depth +
                     config.contact.c_n * depth_rate;
    if (f <= 0.0) continue;
    c.active = true;
    c.force_on_beam = f * n;
    c.force_on_body = -c.force_on_beam;
    c.torque_on_beam = (p - hinge).cross(c.force_on_beam).y();
    out[i].patch.depth = depth;
  }
  return out;
}

Vec3 gravity_torque(const Pose& pose, const BodyParams& body, double g) {
  const Mat3 R = body_rotation(pose.alpha, pose.beta);
  const Vec3 r_com = R * Vec3(0.0, 0.0, -body.h_c);
  return r_com.cross(Vec3(0.0, 0.0, -body.mass * g));
}

CarriageTarget oscillation_targets(double t, const WorldConfig& config) {
  CarriageTarget target{0.0, config.body.H};
  const OscillationSpec& osc = config.oscillation;
  if (!osc.enabled) return target;

  // Lateral: triangle wave, zero-mean, starting upward from 0.
  const double phase = osc.frequency * t - std::floor(osc.frequency * t);
  double tri;
  if (phase < 0.25)
    tri = 4.0 * phase;
  else if (phase < 0.75)
    tri = 2.0 - 4.0 * phase;
  else
    tri = 4.0 * phase - 4.0;
  target.y = osc.amplitude * tri;

  for (const SineComponent& s : osc.vertical)
    target.z += s.amplitude * std::sin(2.0 * kPi * s.frequency * t + s.phase);
  return target;
}

Simulator::Simulator(const WorldConfig& config) : config_(config) {
  require_stiffness(config_);
  state_.pose = Pose{config_.x_start, 0.0, config_.body.H, 0.0, 0.0};
  beams_ = {BeamState{}, BeamState{}};
  sensor_every_ = static_cast<std::int64_t>(
      std::llround(config_.sensor_period() / config_.dt_physics));
  sensor_.reserve(4096);
}

double Simulator::time() const {
  return static_cast<double>(substep_count_) * config_.dt_physics;
}

void Simulator::set_beam_state(int i, double theta, double omega) {
  beams_[static_cast<size_t>(i)] = BeamState{theta, omega};
}

void Simulator::step_control(const ControlInput& u) {
  const std::int64_t n = config_.substeps();
  // Carriage rates hold constant across the step so Y, Z land exactly on
  // the commanded positions at the step boundary.
  state_.v_y = (u.y_des - state_.pose.Y) / config_.dt_control;
  state_.v_z = (u.z_des - state_.pose.Z) / config_.dt_control;
  for (std::int64_t s = 0; s < n; ++s) substep(u);
}

void Simulator::substep(const ControlInput& u) {
  const double dt = config_.dt_physics;
  const BodyParams& body = config_.body;
  const double M = body.mass;
  const double g = config_.g;

  // Contact from the current state; record a sensor tick if this substep
  // starts on a sensor-period boundary (t = 0 included).
  const auto contacts = penalty_contact(state_, beams_, config_);
  Vec3 f_contact = Vec3::Zero();
  Vec3 tau_contact = Vec3::Zero();
  const Vec3 center = state_.pose.center();
  for (const auto& c : contacts) {
    if (!c.active) continue;
    f_contact += c.force_on_body;
    tau_contact += (c.patch.point - center).cross(c.force_on_body);
    if (c.patch.depth > max_penetration_) max_penetration_ = c.patch.depth;
  }
  contact_force_ = f_contact;
  if (substep_count_ % sensor_every_ == 0)
    sensor_.push_back(SensorSample{time(), f_contact, state_.pose});

  // Fore-aft translation (dynamic), carriage axes (kinematic).
  state_.v_x += dt * (u.f_x + f_contact.x()) / M;
  state_.pose.X += dt * state_.v_x;
  state_.pose.Y += dt * state_.v_y;
  state_.pose.Z += dt * state_.v_z;

  // Reduced roll/pitch dynamics. Generalized axes: roll about world X,
  // pitch about the rolled body-y axis y' = Rx(alpha)·ŷ. The reduced mass
  // matrix is diag(I1·cos²β + I3·sin²β, I2); the roll equation carries the
  // (I3 - I1)·sinβ·cosβ·α̇·β̇ rate term from the β-dependent roll inertia.
  const double alpha = state_.pose.alpha, beta = state_.pose.beta;
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const Vec3 y_rolled(0.0, ca, sa);
  const Mat3 R = body_rotation(alpha, beta);
  const Mat3 I_world =
      R * body.inertia.asDiagonal() * R.transpose();
  const Vec3 omega = state_.alpha_dot * Vec3::UnitX() + state_.beta_dot * y_rolled;
  const Vec3 gyro = omega.cross(I_world * omega);
  const Vec3 tau_gravity = gravity_torque(state_.pose, body, g);
  const Vec3 tau_total =
      u.tau1 * Vec3::UnitX() + u.tau2 * y_rolled + tau_gravity + tau_contact;

  const double I1 = body.inertia.x(), I2 = body.inertia.y(), I3 = body.inertia.z();
  const double I_roll = I1 * cb * cb + I3 * sb * sb;
  const double coupling = (I3 - I1) * sb * cb * state_.alpha_dot * state_.beta_dot;
  const double alpha_ddot =
      (Vec3::UnitX().dot(tau_total - gyro) - coupling) / I_roll;
  const double beta_ddot = y_rolled.dot(tau_total - gyro) / I2;
  state_.alpha_dot += dt * alpha_ddot;
  state_.beta_dot += dt * beta_ddot;
  state_.pose.alpha += dt * state_.alpha_dot;
  state_.pose.beta += dt * state_.beta_dot;

  // Beams: torsion spring + damper + destabilizing tip-over gravity about
  // the hinge, plus the contact torque. No hard stop at zero: the default
  // damping overdamps the free beam, so theta never undershoots.
  for (int i = 0; i < 2; ++i) {
    const BeamParams& beam = config_.beams[i];
    const double gravity_tq =
        0.5 * beam.mass * g * beam.length * std::sin(beams_[i].theta);
    const double omega_dot = (-beam.k * beams_[i].theta -
                              beam.c_d * beams_[i].omega + gravity_tq +
                              contacts[i].torque_on_beam) /
                             beam.hinge_inertia();
    beams_[i].omega += dt * omega_dot;
    beams_[i].theta += dt * beams_[i].omega;
  }

  ++substep_count_;
}

EpisodeLog run_episode(const WorldConfig& config, const ControlCallback& controller,
                       const EpisodeOptions& options) {
  WorldConfig cfg = config;
  validate(cfg);
  require_stiffness(cfg);
  Simulator sim(cfg);
  EpisodeLog log;
  const double max_time = options.max_time.value_or(cfg.classify.timeout);
  log.rows.reserve(static_cast<size_t>(max_time / cfg.dt_control) + 1);
  bool prev_tracked = false;

  while (true) {
    const double t = sim.time();
    const RobotState& s = sim.robot();
    const StepContext ctx{t, s, sim.beams(), sim.contact_force(), sim.sensor(), cfg};
    if (s.pose.X >= cfg.x_target) {
      log.termination = Termination::kReachedTarget;
      break;
    }
    if (!prev_tracked && (std::abs(s.pose.alpha) > 0.5 * kPi ||
                          std::abs(s.pose.beta) > 0.5 * kPi)) {
      log.termination = Termination::kFlipped;
      break;
    }
    if (t >= max_time) {
      log.termination = Termination::kTimeout;
      break;
    }
    if (options.stop_when && options.stop_when(ctx)) {
      log.termination = Termination::kStopped;
      break;
    }

    const ControlDecision dec = controller(ctx);
    log.rows.push_back(LogRow{t, s, sim.beams(), dec.u, sim.contact_force(),
                              dec.joints_tracked, dec.phase});
    sim.step_control(dec.u);
    prev_tracked = dec.joints_tracked;
  }

  log.sensor = sim.sensor();
  log.max_penetration = sim.max_penetration();
  log.duration = sim.time();
  log.final_state = sim.robot();
  return log;
}

}  // namespace beamsim
