#include "beamsim/contact_model.hpp"

#include <cmath>

namespace beamsim {

namespace {
constexpr double kLeverEpsilon = 1e-9;  // m, singular lever-arm threshold
}

ContactGeometry compute_contact_geometry(const Pose& pose, const BeamParams& beam,
                                         const BodyParams& body, BeamShape shape) {
  ContactGeometry out;
  const DeflectionResult defl = beam_deflection_required(pose, beam, body, shape);
  out.theta = defl.theta;
  out.over_deflected = defl.over_deflected;
  out.sin_theta = std::sin(defl.theta);
  if (defl.theta <= 0.0) return out;  // free beam: no touch geometry needed
  out.in_contact = true;

  // Patch at exact touch: clearance crosses zero at the returned deflection.
  const ClearanceResult touch = ellipsoid_beam_clearance(pose, defl.theta, beam, body, shape);
  out.normal = touch.patch.normal;
  out.point = touch.patch.point;
  const Vec3 r_b = touch.patch.point - Vec3(0.0, beam.y_hinge, 0.0);
  out.lever = r_b.cross(touch.patch.normal).y();
  out.singular = std::abs(out.lever) < kLeverEpsilon;
  return out;
}

Vec3 beam_force_from_geometry(const ContactGeometry& geom, double k, double c_d,
                              double omega_est, const BeamParams& beam, double g) {
  if (!geom.in_contact || geom.singular || geom.over_deflected) return Vec3::Zero();
  const double gravity_torque = 0.5 * beam.mass * g * beam.length * geom.sin_theta;
  const double f = (k * geom.theta + c_d * omega_est - gravity_torque) / geom.lever;
  if (f <= 0.0) return Vec3::Zero();
  return -f * geom.normal;  // reaction on the body
}

Vec3 beam_force(const Pose& pose, int beam_index, double k, double omega_est,
                const WorldConfig& config) {
  const BeamParams& beam = config.beams[beam_index];
  const ContactGeometry geom = compute_contact_geometry(pose, beam, config.body);
  return beam_force_from_geometry(geom, k, beam.c_d, omega_est, beam, config.g);
}

SeriesGeometry compute_series_geometry(const std::vector<PoseSample>& samples,
                                       const WorldConfig& config) {
  SeriesGeometry out;
  const std::size_t n = samples.size();
  out.geo.resize(n);
  out.omega_est.assign(n, {0.0, 0.0});
  out.usable.assign(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 0; b < 2; ++b) {
      out.geo[i][b] =
          compute_contact_geometry(samples[i].pose, config.beams[b], config.body);
      if (out.geo[i][b].in_contact &&
          (out.geo[i][b].singular || out.geo[i][b].over_deflected))
        out.usable[i] = false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t lo = i > 0 ? i - 1 : i;
      const std::size_t hi = i + 1 < n ? i + 1 : i;
      const double dt = samples[hi].t - samples[lo].t;
      out.omega_est[i][b] =
          dt > 0.0 ? (out.geo[hi][b].theta - out.geo[lo][b].theta) / dt : 0.0;
    }
  }
  return out;
}

std::vector<Vec3> predict_from_geometry(const SeriesGeometry& series, double k1, double k2,
                                        const WorldConfig& config) {
  const double ks[2] = {k1, k2};
  std::vector<Vec3> forces(series.geo.size(), Vec3::Zero());
  for (std::size_t i = 0; i < series.geo.size(); ++i) {
    Vec3 f = Vec3::Zero();
    for (int b = 0; b < 2; ++b)
      f += beam_force_from_geometry(series.geo[i][b], ks[b], config.beams[b].c_d,
                                    series.omega_est[i][b], config.beams[b], config.g);
    forces[i] = f;
  }
  return forces;
}

std::vector<Vec3> predict_force_series(const std::vector<PoseSample>& samples, double k1,
                                       double k2, const WorldConfig& config) {
  return predict_from_geometry(compute_series_geometry(samples, config), k1, k2, config);
}

ContactWrench predict_contact_wrench(const Pose& pose, const std::array<double, 2>& k,
                                     const std::array<double, 2>& omega_est,
                                     const WorldConfig& config) {
  ContactWrench w;
  for (int b = 0; b < 2; ++b) {
    const ContactGeometry geom =
        compute_contact_geometry(pose, config.beams[b], config.body);
    const Vec3 f = beam_force_from_geometry(geom, k[b], config.beams[b].c_d, omega_est[b],
                                            config.beams[b], config.g);
    w.force += f;
    w.torque += (geom.point - pose.center()).cross(f);
  }
  return w;
}

}  // namespace beamsim
