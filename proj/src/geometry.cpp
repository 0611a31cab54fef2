#include "beamsim/geometry.hpp"

#include <cmath>
#include <limits>

namespace beamsim {
namespace {

// Closest point to the origin on the parallelogram c0 + x*p + y*q with
// x in [xlo, xhi], y in [ylo, yhi]. Exact: interior stationary point via the
// 2x2 normal equations, otherwise the best of the four clamped edges.
struct FaceHit {
  double dist2;
  Vec3 point;
};

FaceHit face_closest(const Vec3& c0, const Vec3& p, const Vec3& q,
                     double xlo, double xhi, double ylo, double yhi) {
  const double pp = p.squaredNorm(), qq = q.squaredNorm(), pq = p.dot(q);
  const double pc = p.dot(c0), qc = q.dot(c0);
  const double det = pp * qq - pq * pq;
  if (det > 1e-300) {
    const double x = (-pc * qq + pq * qc) / det;
    const double y = (-qc * pp + pq * pc) / det;
    if (x >= xlo && x <= xhi && y >= ylo && y <= yhi) {
      const Vec3 s = c0 + x * p + y * q;
      return {s.squaredNorm(), s};
    }
  }
  FaceHit best{std::numeric_limits<double>::infinity(), Vec3::Zero()};
  auto edge = [&](const Vec3& base, const Vec3& axis, double lo, double hi) {
    const double aa = axis.squaredNorm();
    double t = aa > 0.0 ? -base.dot(axis) / aa : lo;
    t = std::min(std::max(t, lo), hi);
    const Vec3 s = base + t * axis;
    const double d2 = s.squaredNorm();
    if (d2 < best.dist2) best = {d2, s};
  };
  edge(c0 + xlo * p, q, ylo, yhi);
  edge(c0 + xhi * p, q, ylo, yhi);
  edge(c0 + ylo * q, p, xlo, xhi);
  edge(c0 + yhi * q, p, xlo, xhi);
  return best;
}

// Per-pose clearance evaluator against the +Y beam geometry. Sphere space is
// s = S R^T (q_world - center) with S = diag(1/a,1/b,1/c); the deflected
// plate maps to a parallelepiped spanned by the three mapped box axes.
struct ClearanceEvaluator {
  ClearanceEvaluator(const Pose& pose, const BeamParams& beam_in, const BodyParams& body_in)
      : beam(beam_in), body(body_in) {
    R = body_rotation(pose.alpha, pose.beta);
    const Mat3 A = Vec3(1.0 / body.a, 1.0 / body.b, 1.0 / body.c).asDiagonal() * R.transpose();
    a0 = A.col(0);
    a1 = A.col(1);
    a2 = A.col(2);
    m0 = A * (Vec3(0.0, beam.y_hinge, 0.0) - pose.center());
    center = pose.center();
  }

  ClearanceResult eval(double theta, BeamShape shape) const {
    const double ct = std::cos(theta), st = std::sin(theta);
    // Mapped axes of the plate box directions (thickness, width, height).
    const Vec3 eu = ct * a0 - st * a2;
    const Vec3 ev = a1;
    const Vec3 eh = st * a0 + ct * a2;
    const double tu = beam.thickness / 2.0, wv = beam.width / 2.0, L = beam.length;

    FaceHit best{std::numeric_limits<double>::infinity(), Vec3::Zero()};
    auto consider = [&best](const FaceHit& h) {
      if (h.dist2 < best.dist2) best = h;
    };
    if (shape == BeamShape::kMidplane) {
      best = face_closest(m0, ev, eh, -wv, wv, 0.0, L);
    } else {
      consider(face_closest(m0 - tu * eu, ev, eh, -wv, wv, 0.0, L));
      consider(face_closest(m0 + tu * eu, ev, eh, -wv, wv, 0.0, L));
      consider(face_closest(m0 - wv * ev, eu, eh, -tu, tu, 0.0, L));
      consider(face_closest(m0 + wv * ev, eu, eh, -tu, tu, 0.0, L));
      consider(face_closest(m0, eu, ev, -tu, tu, -wv, wv));
      consider(face_closest(m0 + L * eh, eu, ev, -tu, tu, -wv, wv));
    }

    ClearanceResult res;
    const double d = std::sqrt(best.dist2);
    if (d < 1e-12) {  // sphere center on the plate surface: degenerate pose
      res.clearance = -body.c;
      res.patch.point = center;
      res.patch.normal = Vec3::UnitX();
      res.patch.depth = body.c;
      return res;
    }
    const Vec3 qhat = best.point / d;
    // Scale factor between sphere-space radial gap and the world-space gap
    // along the ellipsoid normal at the surface point hit by the ray.
    const Vec3 grad(qhat.x() / body.a, qhat.y() / body.b, qhat.z() / body.c);
    const double gn = grad.norm();
    res.clearance = (d - 1.0) / gn;
    res.patch.point =
        center + R * Vec3(body.a * qhat.x(), body.b * qhat.y(), body.c * qhat.z());
    res.patch.normal = R * (grad / gn);
    res.patch.depth = res.clearance < 0.0 ? -res.clearance : 0.0;
    return res;
  }

  const BeamParams& beam;
  const BodyParams& body;
  Mat3 R;
  Vec3 a0, a1, a2, m0, center;
};

ClearanceResult mirror_result(ClearanceResult r) {
  r.patch.point.y() = -r.patch.point.y();
  r.patch.normal.y() = -r.patch.normal.y();
  return r;
}

}  // namespace

Mat3 body_rotation(double alpha, double beta) {
  return (Eigen::AngleAxisd(alpha, Vec3::UnitX()) * Eigen::AngleAxisd(beta, Vec3::UnitY()))
      .toRotationMatrix();
}

Vec3 ellipsoid_normal(const Vec3& p_body, const BodyParams& body) {
  const double a2 = body.a * body.a, b2 = body.b * body.b, c2 = body.c * body.c;
  return Vec3(b2 * c2 * p_body.x(), a2 * c2 * p_body.y(), a2 * b2 * p_body.z()).normalized();
}

ClearanceResult ellipsoid_beam_clearance(const Pose& pose, double theta,
                                         const BeamParams& beam, const BodyParams& body,
                                         BeamShape shape) {
  // Evaluate beams on the -Y side through the mirrored pose so the two sides
  // are exact mirror images in floating point as well as in geometry.
  if (beam.y_hinge < 0.0) {
    BeamParams flipped = beam;
    flipped.y_hinge = -beam.y_hinge;
    return mirror_result(
        ellipsoid_beam_clearance(pose.mirrored(), theta, flipped, body, shape));
  }
  return ClearanceEvaluator(pose, beam, body).eval(theta, shape);
}

DeflectionResult beam_deflection_required(const Pose& pose, const BeamParams& beam,
                                          const BodyParams& body, BeamShape shape,
                                          double tol) {
  if (beam.y_hinge < 0.0) {
    BeamParams flipped = beam;
    flipped.y_hinge = -beam.y_hinge;
    return beam_deflection_required(pose.mirrored(), flipped, body, shape, tol);
  }
  const ClearanceEvaluator ev(pose, beam, body);
  if (ev.eval(0.0, shape).clearance >= 0.0) return {0.0, false};
  if (ev.eval(kPi / 2.0, shape).clearance < 0.0) return {kPi / 2.0, true};
  double lo = 0.0, hi = kPi / 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ev.eval(mid, shape).clearance >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return {hi, false};  // clear-side end of the bracket
}

}  // namespace beamsim
