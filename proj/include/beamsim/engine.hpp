#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "beamsim/contact_model.hpp"
#include "beamsim/geometry.hpp"
#include "beamsim/params.hpp"

namespace beamsim {

/// Body state. X translates dynamically under the fore-aft force; Y and Z
/// are position-driven by the carriage motors (their velocities are the
/// command rates, kept for contact damping); roll/pitch are the two free or
/// torque-driven joint coordinates about the rotation center.
struct RobotState {
  Pose pose;
  double v_x = 0.0;                      // m/s
  double v_y = 0.0, v_z = 0.0;           // m/s, kinematic command rates
  double alpha_dot = 0.0, beta_dot = 0.0;  // rad/s
};

struct BeamState {
  double theta = 0.0;  // rad, >= 0 toward +X
  double omega = 0.0;  // rad/s
};

/// One control-step actuation command. f_x acts on the body; tau1/tau2 act
/// about the roll/pitch joint axes; y_des/z_des are carriage position
/// commands reached (linearly) by the end of the step.
struct ControlInput {
  double f_x = 0.0;    // N
  double tau1 = 0.0;   // N·m roll
  double tau2 = 0.0;   // N·m pitch
  double y_des = 0.0;  // m
  double z_des = 0.0;  // m
};

struct ForceSample {
  double t = 0.0;
  Vec3 force = Vec3::Zero();  // N, total contact force on the body
};

/// 40 Hz sensor tick: force and pose recorded at the same physics substep.
struct SensorSample {
  double t = 0.0;
  Vec3 force = Vec3::Zero();
  Pose pose;
};

enum class Phase { kApproach = 0, kDelay = 1, kTracking = 2 };

struct ControlDecision {
  ControlInput u;
  bool joints_tracked = false;  // roll/pitch actively commanded this step
  Phase phase = Phase::kApproach;
};

enum class Termination { kNone, kReachedTarget, kTimeout, kFlipped, kStopped };

enum class TraversalMode { kNone, kTraversedPitch, kTraversedRoll, kStuck, kFlipped };

struct LogRow {
  double t = 0.0;
  RobotState state;
  std::array<BeamState, 2> beams;
  ControlInput u;
  Vec3 force_sensed = Vec3::Zero();  // contact force at the latest substep
  bool joints_tracked = false;
  Phase phase = Phase::kApproach;
};

struct EpisodeEvents {
  std::optional<double> t_c;  // s, first sensed contact
  std::optional<double> t_s;  // s, tracking handover (t_c + delay)
};

struct EpisodeLog {
  std::vector<LogRow> rows;
  std::vector<SensorSample> sensor;
  EpisodeEvents events;
  Termination termination = Termination::kNone;
  TraversalMode outcome = TraversalMode::kNone;
  double energy_mJ = 0.0;          // filled by the strategy runner
  double max_penetration = 0.0;    // m
  double duration = 0.0;           // s
  RobotState final_state;

  std::vector<ForceSample> sensor_forces() const;
  std::vector<PoseSample> sensor_poses() const;
};

/// Per-beam penalty contact resolved at one state. Forces obey Newton's
/// third law exactly: force_on_beam == -force_on_body.
struct BeamContact {
  bool active = false;
  ContactPatch patch;
  Vec3 force_on_body = Vec3::Zero();
  Vec3 force_on_beam = Vec3::Zero();
  double torque_on_beam = 0.0;  // N·m about the hinge axis (+Y)
};

std::array<BeamContact, 2> penalty_contact(const RobotState& state,
                                           const std::array<BeamState, 2>& beams,
                                           const WorldConfig& config);

/// Bottom-heaviness torque about the rotation center: the CoM hangs h_c
/// below it along body -z. Zero at the upright pose, restoring nearby.
Vec3 gravity_torque(const Pose& pose, const BodyParams& body, double g);

/// Carriage oscillation commands at time t: lateral triangle wave, vertical
/// seeded multi-sine about H. Identity (0, H) when disabled.
struct CarriageTarget {
  double y = 0.0;
  double z = 0.0;
};
CarriageTarget oscillation_targets(double t, const WorldConfig& config);

/// Fixed-step simulator: semi-implicit Euler at dt_physics, commands held
/// (forces) or interpolated (carriage positions) across one control step.
class Simulator {
 public:
  explicit Simulator(const WorldConfig& config);

  const RobotState& robot() const { return state_; }
  const std::array<BeamState, 2>& beams() const { return beams_; }
  double time() const;
  const Vec3& contact_force() const { return contact_force_; }
  double max_penetration() const { return max_penetration_; }
  const std::vector<SensorSample>& sensor() const { return sensor_; }

  void set_beam_state(int i, double theta, double omega);
  void set_robot_state(const RobotState& s) { state_ = s; }

  /// Advances one control step (substeps() physics steps).
  void step_control(const ControlInput& u);

 private:
  void substep(const ControlInput& u);

  WorldConfig config_;
  RobotState state_;
  std::array<BeamState, 2> beams_;
  Vec3 contact_force_ = Vec3::Zero();
  double max_penetration_ = 0.0;
  std::vector<SensorSample> sensor_;
  std::int64_t substep_count_ = 0;
  std::int64_t sensor_every_ = 0;
};

struct StepContext {
  double t = 0.0;
  const RobotState& state;
  const std::array<BeamState, 2>& beams;
  const Vec3& contact_force;
  const std::vector<SensorSample>& sensor;
  const WorldConfig& config;
};

struct EpisodeOptions {
  std::optional<double> max_time;  // default: config.classify.timeout
  /// Early stop for sweep runs (e.g. "sensing window complete").
  std::function<bool(const StepContext&)> stop_when;
};

using ControlCallback = std::function<ControlDecision(const StepContext&)>;

/// Runs one episode from the standard start (X = x_start, flat pose, beams
/// upright) until target / timeout / flip / stop. Deterministic: identical
/// config and controller behavior give bit-identical logs.
EpisodeLog run_episode(const WorldConfig& config, const ControlCallback& controller,
                       const EpisodeOptions& options = {});

}  // namespace beamsim
