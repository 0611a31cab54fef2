#pragma once

#include "beamsim/params.hpp"
#include "beamsim/types.hpp"

namespace beamsim {

/// World-frame pose of the body: geometric center at (X, Y, Z); orientation
/// is roll alpha about world X through the center followed by pitch beta
/// about the rolled body y axis, i.e. R = Rx(alpha) * Ry(beta).
struct Pose {
  double X = 0.0, Y = 0.0, Z = 0.0;  // m
  double alpha = 0.0, beta = 0.0;    // rad

  Vec3 center() const { return {X, Y, Z}; }
  /// Reflection through the Y = 0 plane maps this body onto itself at the
  /// mirrored pose; used to evaluate the -Y beam against +Y geometry.
  Pose mirrored() const { return {X, -Y, Z, -alpha, beta}; }
};

Mat3 body_rotation(double alpha, double beta);

/// Outward unit surface normal of the ellipsoid at a body-frame surface
/// point (gradient direction of the implicit surface function).
Vec3 ellipsoid_normal(const Vec3& p_body, const BodyParams& body);

struct ContactPatch {
  Vec3 point = Vec3::Zero();   // world, on the ellipsoid surface
  Vec3 normal = Vec3::UnitX(); // world, outward from the ellipsoid
  double depth = 0.0;          // m, penetration (0 when separated)
  int beam_index = -1;
};

/// Beam collision geometry: the full plate box for simulation contact, or
/// its zero-thickness mid-plane for landscape deflection resolution.
enum class BeamShape { kBox, kMidplane };

struct ClearanceResult {
  double clearance = 0.0;  // m along the ellipsoid normal; < 0 = penetration
  ContactPatch patch;      // always filled (deepest/closest feature)
};

/// Signed separation between the ellipsoid at `pose` and the beam deflected
/// by `theta`. Computed in sphere space (the affine map taking the ellipsoid
/// to a unit sphere, under which the plate maps to a parallelepiped) and
/// rescaled to meters along the ellipsoid normal at the closest feature.
ClearanceResult ellipsoid_beam_clearance(const Pose& pose, double theta,
                                         const BeamParams& beam, const BodyParams& body,
                                         BeamShape shape = BeamShape::kBox);

struct DeflectionResult {
  double theta = 0.0;          // rad
  bool over_deflected = false; // true when even theta = pi/2 still collides
};

/// Minimal theta in [0, pi/2] with nonnegative clearance (kinematic closure:
/// how far the pose forces the beam down). Bisection to `tol` radians.
DeflectionResult beam_deflection_required(const Pose& pose, const BeamParams& beam,
                                          const BodyParams& body,
                                          BeamShape shape = BeamShape::kBox,
                                          double tol = 1e-5);

}  // namespace beamsim
