#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace beamsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Positive part, used by the actuation-energy metric.
inline constexpr double pos(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace beamsim
