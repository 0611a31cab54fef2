#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "beamsim/types.hpp"

namespace beamsim {

/// Rigid ellipsoidal body driven through the beam field. Semi-axes are
/// body-frame x (fore-aft), y (lateral), z (vertical); the center of mass
/// sits h_c below the geometric center (bottom-heavy), and the rotation
/// center (gimbal point) is the geometric center, held at height H by the
/// vertical rod.
struct BodyParams {
  double mass = 1.0;           // kg
  double a = 0.11;             // m, fore-aft semi-axis
  double b = 0.08;             // m, lateral semi-axis
  double c = 0.03;             // m, vertical semi-axis
  double h_c = 0.01;           // m, CoM offset below geometric center
  Vec3 inertia{1.0e-3, 3.5e-3, 5.0e-3};  // kg·m² principal (body x, y, z)
  double H = 0.105;            // m, rotation-center height above ground
};

/// Torsion-spring-hinged beam. The hinge line is horizontal along world Y at
/// X = 0, Z = 0, centered at y_hinge; deflection theta >= 0 tips the beam
/// toward +X (right-handed rotation about +Y).
struct BeamParams {
  double k = std::nan("");     // N·m/rad torsional stiffness; scenario input
  double c_d = 0.01;           // N·m·s/rad hinge damping
  double mass = 0.001;         // kg
  double length = 0.155;       // m, height when upright
  double width = 0.04;         // m, extent along the hinge (world Y)
  double thickness = 0.01;     // m, extent normal to the plate
  double y_hinge = 0.0;        // m, hinge-center lateral offset

  bool stiffness_set() const { return !std::isnan(k); }
  /// Hinge-axis moment of inertia of the plate about its bottom edge.
  double hinge_inertia() const {
    return mass * (length * length / 3.0 + thickness * thickness / 12.0);
  }
};

struct SineComponent {
  double amplitude = 0.0;  // m
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

/// Kinematic excitation of the lateral (Y) and vertical (Z) rod motors used
/// as the sensing stimulus: Y follows a triangle wave, Z a seeded 30-sine
/// sum superposed on the nominal height H.
struct OscillationSpec {
  bool enabled = false;
  double frequency = 2.0;        // Hz, lateral triangle wave
  double amplitude = 0.001;      // m, lateral triangle amplitude
  std::uint64_t seed = 0;        // vertical component draw
  std::vector<SineComponent> vertical;  // filled at validation if empty
};

struct ContactParams {
  double k_n = 5000.0;  // N/m penalty stiffness
  double c_n = 5.0;     // N·s/m penalty damping
};

struct InputLimits {
  double f_x_max = 1.0;    // N
  double tau1_max = 0.1;   // N·m (roll)
  double tau2_max = 0.1;   // N·m (pitch)
};

struct SensorParams {
  double rate_hz = 40.0;      // force/pose sampling rate
  double threshold = 0.01;    // N, contact detection level
};

struct DelayParams {
  double sensing_time = 0.1;  // s, T_s force-collection window
  double delay = 0.12;        // s, contact-to-tracking latency (>= T_s)
};

struct ControlParams {
  double velocity_gain = 400.0;  // N·s/m, fore-aft velocity servo
  double kp_x = 20.0;            // N/m tracking gains (overdamped with kd_x)
  double kd_x = 20.0;            // N·s/m
  double kp_ang = 2.0;           // N·m/rad (roll and pitch)
  double kd_ang = 0.4;           // N·m·s/rad
  /// First-order smoothing time for the tracked waypoint reference; blends
  /// the grid plan's alternating translate/rotate edges into simultaneous
  /// motion instead of braking each channel at every edge boundary.
  double ref_smooth_time = 0.1;  // s
};

struct PlannerParams {
  double rotation_rate = 1.0;  // rad/s, time-parameterization of roll/pitch edges
};

struct ClassifyParams {
  double roll_threshold = deg2rad(30.0);  // rad, roll- vs pitch-mode split
  double stuck_x = 0.0;                   // m, timeout position threshold
  double timeout = 60.0;                  // s
};

/// Energy-landscape grid over (X, alpha, beta).
struct GridSpec {
  double x_min = -0.12, x_max = 0.12, x_step = 0.002;            // m
  double ang_min = deg2rad(-90.0), ang_max = deg2rad(90.0);      // rad
  double ang_step = deg2rad(2.0);                                // rad
  int nx() const { return static_cast<int>(std::lround((x_max - x_min) / x_step)) + 1; }
  int na() const { return static_cast<int>(std::lround((ang_max - ang_min) / ang_step)) + 1; }
};

struct WorldConfig {
  double g = 9.81;            // m/s²
  BodyParams body;
  std::array<BeamParams, 2> beams;
  double gap = 0.138;         // m, lateral gap d between beam inner edges
  double v_x = 0.05;          // m/s commanded forward speed
  double dt_control = 0.002;  // s
  double dt_physics = 2.0e-4; // s
  double x_start = -0.25;     // m
  double x_target = 0.1;      // m
  ContactParams contact;
  InputLimits limits;
  SensorParams sensor;
  DelayParams delays;
  OscillationSpec oscillation;
  ControlParams control;
  PlannerParams planner;
  ClassifyParams classify;
  GridSpec grid;
  std::uint64_t seed = 1;

  WorldConfig() {
    beams[0].y_hinge = -(gap / 2.0 + beams[0].width / 2.0);
    beams[1].y_hinge = +(gap / 2.0 + beams[1].width / 2.0);
  }
  int substeps() const { return static_cast<int>(std::lround(dt_control / dt_physics)); }
  double sensor_period() const { return 1.0 / sensor.rate_hz; }
};

/// Draws the 30 vertical sine components: amplitudes uniform in ±0.5 mm,
/// frequencies i·f/50 for i = 1..30, phases uniform in [0, 2π).
std::vector<SineComponent> make_vertical_oscillation(double frequency, std::uint64_t seed);

/// Checks ranges and mutual constraints (positive dims, dt divisibility,
/// delay >= sensing time, ...). Fills oscillation.vertical from the seed when
/// enabled and empty. Throws std::invalid_argument naming the bad field.
/// Stiffness may stay unset here; simulation entry points require it.
void validate(WorldConfig& config);

/// Additional gate for operations that need beam dynamics: k must be set.
void require_stiffness(const WorldConfig& config);

}  // namespace beamsim
