#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "beamsim/contact_model.hpp"
#include "beamsim/control.hpp"
#include "beamsim/engine.hpp"

using namespace beamsim;

namespace {
WorldConfig make_config(double k = 0.5) {
  WorldConfig c;
  c.beams[0].k = k;
  c.beams[1].k = k;
  validate(c);
  return c;
}

Pose wedged_pose(const WorldConfig& c) { return Pose{-0.055, 0.0, c.body.H, 0.0, 0.0}; }
}  // namespace

TEST_CASE("quasistatic force is affine in stiffness and along -normal") {
  const WorldConfig c = make_config();
  const ContactGeometry g =
      compute_contact_geometry(wedged_pose(c), c.beams[0], c.body);
  REQUIRE(g.in_contact);
  REQUIRE(g.theta > 0.0);
  const Vec3 f0 = beam_force_from_geometry(g, 0.4, c.beams[0].c_d, 0.0, c.beams[0], c.g);
  const Vec3 f1 = beam_force_from_geometry(g, 0.6, c.beams[0].c_d, 0.0, c.beams[0], c.g);
  const Vec3 f2 = beam_force_from_geometry(g, 0.8, c.beams[0].c_d, 0.0, c.beams[0], c.g);
  CHECK(((f2 - f1) - (f1 - f0)).norm() < 1e-12);  // equal increments
  // Direction: pushes the body away from the beam, along -normal.
  CHECK((f1.normalized() + g.normal).norm() < 1e-9);
  // Magnitude matches the hinge torque balance (k theta + c_d w - m g L/2 sin) / lever.
  const double expect =
      (0.6 * g.theta - 0.5 * c.beams[0].mass * c.g * c.beams[0].length * g.sin_theta) /
      g.lever;
  CHECK(f1.norm() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("force clamps at zero when the spring cannot hold the beam up") {
  const WorldConfig c = make_config();
  const ContactGeometry g =
      compute_contact_geometry(wedged_pose(c), c.beams[0], c.body);
  REQUIRE(g.in_contact);
  // k = 0: only the beam's own weight acts, which pulls the beam away from
  // the body (gravity term negative) -> clamped to zero force.
  const Vec3 f = beam_force_from_geometry(g, 0.0, 0.0, 0.0, c.beams[0], c.g);
  CHECK(f.norm() == 0.0);
  // Out of contact: zero.
  const ContactGeometry far_g = compute_contact_geometry(
      Pose{-0.2, 0.0, c.body.H, 0.0, 0.0}, c.beams[0], c.body);
  CHECK_FALSE(far_g.in_contact);
  CHECK(beam_force_from_geometry(far_g, 0.5, 0.01, 0.0, c.beams[0], c.g).norm() == 0.0);
}

TEST_CASE("series geometry differentiates deflection with central differences") {
  const WorldConfig c = make_config();
  // Scripted approach: X advances linearly, so theta(t) is smooth and the
  // interior rate must match the two-sided finite difference of theta.
  std::vector<PoseSample> poses;
  const double dt = c.sensor_period();
  for (int i = 0; i < 9; ++i)
    poses.push_back({i * dt, Pose{-0.060 + 0.001 * i, 0.0, c.body.H, 0.0, 0.0}});
  const SeriesGeometry s = compute_series_geometry(poses, c);
  REQUIRE(s.geo.size() == poses.size());
  for (std::size_t i = 1; i + 1 < poses.size(); ++i) {
    const double fd =
        (s.geo[i + 1][0].theta - s.geo[i - 1][0].theta) / (2.0 * dt);
    CHECK(s.omega_est[i][0] == doctest::Approx(fd).epsilon(1e-12));
  }
  // One-sided at the ends.
  CHECK(s.omega_est.front()[0] ==
        doctest::Approx((s.geo[1][0].theta - s.geo[0][0].theta) / dt).epsilon(1e-12));
  CHECK(s.omega_est.back()[0] ==
        doctest::Approx((s.geo[8][0].theta - s.geo[7][0].theta) / dt).epsilon(1e-12));
}

TEST_CASE("series prediction equals the per-beam force sum") {
  const WorldConfig c = make_config();
  std::vector<PoseSample> poses;
  for (int i = 0; i < 6; ++i)
    poses.push_back({i * 0.025, Pose{-0.058 + 0.001 * i, 0.0005 * i, c.body.H,
                                     0.002 * i, -0.001 * i}});
  const SeriesGeometry s = compute_series_geometry(poses, c);
  const std::vector<Vec3> pred = predict_from_geometry(s, 0.5, 0.3, c);
  REQUIRE(pred.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Vec3 manual =
        beam_force_from_geometry(s.geo[i][0], 0.5, c.beams[0].c_d, s.omega_est[i][0],
                                 c.beams[0], c.g) +
        beam_force_from_geometry(s.geo[i][1], 0.3, c.beams[1].c_d, s.omega_est[i][1],
                                 c.beams[1], c.g);
    CHECK((pred[i] - manual).norm() < 1e-12);
  }
  const std::vector<Vec3> wrapped = predict_force_series(poses, 0.5, 0.3, c);
  for (std::size_t i = 0; i < poses.size(); ++i)
    CHECK((pred[i] - wrapped[i]).norm() == 0.0);
}

TEST_CASE("predicted wrench torques are moments of the beam forces") {
  const WorldConfig c = make_config();
  const Pose pose = wedged_pose(c);
  const ContactWrench w =
      predict_contact_wrench(pose, {0.5, 0.5}, {0.0, 0.0}, c);
  Vec3 force = Vec3::Zero(), torque = Vec3::Zero();
  for (int b = 0; b < 2; ++b) {
    const ContactGeometry g = compute_contact_geometry(pose, c.beams[b], c.body);
    const Vec3 f =
        beam_force_from_geometry(g, 0.5, c.beams[b].c_d, 0.0, c.beams[b], c.g);
    force += f;
    torque += (g.point - pose.center()).cross(f);
  }
  CHECK((w.force - force).norm() < 1e-12);
  CHECK((w.torque - torque).norm() < 1e-12);
}

TEST_CASE("quasistatic model reproduces slow-push sensed forces within 10 percent") {
  // Drive the body slowly into the beams with the standard feedforward servo
  // and compare the sensed force window against the model evaluated at the
  // true stiffness on the sensed poses.
  WorldConfig c = make_config(0.5);
  c.oscillation.enabled = false;
  validate(c);
  const StrategyRunResult run = run_strategy(make_strategy("ff"), c, 1);
  const std::vector<ForceSample> forces = run.log.sensor_forces();
  const std::vector<PoseSample> poses = run.log.sensor_poses();
  const auto t_c = detect_contact(forces, c.sensor.threshold);
  REQUIRE(t_c.has_value());
  const std::vector<Vec3> pred = predict_force_series(poses, 0.5, 0.5, c);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (forces[i].t < *t_c || forces[i].t >= *t_c + 0.3) continue;
    num += (pred[i] - forces[i].force).squaredNorm();
    den += forces[i].force.squaredNorm();
  }
  REQUIRE(den > 0.0);
  CHECK(std::sqrt(num / den) < 0.10);
}
