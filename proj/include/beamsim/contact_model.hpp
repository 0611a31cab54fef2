#pragma once

#include <array>
#include <vector>

#include "beamsim/geometry.hpp"
#include "beamsim/params.hpp"

namespace beamsim {

struct PoseSample {
  double t = 0.0;  // s
  Pose pose;
};

/// Stiffness-independent part of the quasistatic beam force at one pose:
/// required deflection plus the touch patch and its hinge lever arm. With
/// this cached, force prediction is affine in the stiffness, which is what
/// makes the estimator's inner loop cheap.
struct ContactGeometry {
  double theta = 0.0;       // rad, kinematic closure deflection
  double sin_theta = 0.0;
  double lever = 0.0;       // m, hinge torque per unit normal force
  Vec3 normal = Vec3::UnitX();  // outward from the ellipsoid at the patch
  Vec3 point = Vec3::Zero();    // world contact point
  bool in_contact = false;
  bool over_deflected = false;
  bool singular = false;    // |lever| too small for a force solution
};

ContactGeometry compute_contact_geometry(const Pose& pose, const BeamParams& beam,
                                         const BodyParams& body,
                                         BeamShape shape = BeamShape::kBox);

/// Quasistatic force the beam applies to the body: the normal force along
/// -normal whose hinge torque balances spring, damping and beam weight at
/// the closure deflection: f = (k*theta + c_d*omega - (m g L / 2) sin(theta))
/// / lever, clamped at zero. Zero when not in contact.
Vec3 beam_force_from_geometry(const ContactGeometry& geom, double k, double c_d,
                              double omega_est, const BeamParams& beam, double g);

/// Convenience wrapper: geometry + force in one call for beam `beam_index`.
Vec3 beam_force(const Pose& pose, int beam_index, double k, double omega_est,
                const WorldConfig& config);

/// Pose-series geometry with deflection rates estimated by central finite
/// differences of theta across adjacent samples (one-sided at the ends).
struct SeriesGeometry {
  std::vector<std::array<ContactGeometry, 2>> geo;
  std::vector<std::array<double, 2>> omega_est;  // rad/s
  std::vector<bool> usable;  // false when a beam patch is singular/degenerate
};

SeriesGeometry compute_series_geometry(const std::vector<PoseSample>& samples,
                                       const WorldConfig& config);

/// Total predicted body force (both beams) per sample for stiffness (k1,k2).
std::vector<Vec3> predict_from_geometry(const SeriesGeometry& series, double k1, double k2,
                                        const WorldConfig& config);

/// One-call prediction over a pose series.
std::vector<Vec3> predict_force_series(const std::vector<PoseSample>& samples, double k1,
                                       double k2, const WorldConfig& config);

/// Predicted quasistatic contact wrench about the body center at one pose,
/// for feedforward compensation in the tracking controller.
struct ContactWrench {
  Vec3 force = Vec3::Zero();   // N, on the body
  Vec3 torque = Vec3::Zero();  // N·m about the body center
};

ContactWrench predict_contact_wrench(const Pose& pose, const std::array<double, 2>& k,
                                     const std::array<double, 2>& omega_est,
                                     const WorldConfig& config);

}  // namespace beamsim
