#include "beamsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamsim/rng.hpp"

namespace beamsim {
namespace {

// Seed streams: one per independent random draw per episode.
constexpr std::uint64_t kOscillationStream = 0x05c1;
constexpr std::uint64_t kEstimatorStream = 0x05c2;

/// Carriage handover ramp: after tracking starts, Y and Z blend from their
/// frozen values to (0, H) over this long to avoid a rate spike.
constexpr double kFreezeBlend = 0.05;  // s

double clamp_abs(double v, double bound) { return std::clamp(v, -bound, bound); }

/// Shared approach behavior: fore-aft velocity servo, free roll/pitch,
/// carriage following the oscillation profile (or parked when disabled).
ControlInput approach_input(const StepContext& ctx, bool limits_enabled) {
  const WorldConfig& cfg = ctx.config;
  ControlInput u;
  u.f_x = cfg.control.velocity_gain * (cfg.v_x - ctx.state.v_x);
  // Command the profile value at the end of the step: the carriage
  // interpolates across the stepitself, so boundaries land exactly on it.
  const CarriageTarget c = oscillation_targets(ctx.t + cfg.dt_control, cfg);
  u.y_des = c.y;
  u.z_des = c.z;
  return clamp_input(u, cfg.limits, limits_enabled);
}

class FeedforwardController {
 public:
  explicit FeedforwardController(bool limits) : limits_(limits) {}
  ControlDecision operator()(const StepContext& ctx) const {
    return ControlDecision{approach_input(ctx, limits_), false, Phase::kApproach};
  }

 private:
  bool limits_;
};

class AvoidanceController {
 public:
  AvoidanceController(const WorldConfig& cfg, const Strategy& st)
      : limits_(st.limits_enabled),
        alpha_cmd_(st.roll_safety * min_clearance_roll(cfg)),
        rate_(cfg.planner.rotation_rate),
        rollback_x_(std::max(cfg.x_target,
                             cfg.body.a + cfg.beams[0].thickness / 2.0 + 0.005)) {
    // Start the roll ramp so the commanded angle is reached before the nose
    // can touch an upright beam.
    const double arrival_x = -(cfg.body.a + cfg.beams[0].thickness / 2.0);
    const double t_arrival = (arrival_x - cfg.x_start) / cfg.v_x;
    ramp_start_ = std::max(0.0, t_arrival - st.roll_lead_time);
  }

  ControlDecision operator()(const StepContext& ctx) {
    const WorldConfig& cfg = ctx.config;
    double a_ref = 0.0, a_rate = 0.0;
    if (t_down_ < 0.0 && ctx.state.pose.X >= rollback_x_) t_down_ = ctx.t;
    if (t_down_ >= 0.0) {
      a_ref = std::max(0.0, alpha_cmd_ - (ctx.t - t_down_) * rate_);
      a_rate = a_ref > 0.0 ? -rate_ : 0.0;
    } else if (ctx.t >= ramp_start_) {
      a_ref = std::min(alpha_cmd_, (ctx.t - ramp_start_) * rate_);
      a_rate = a_ref < alpha_cmd_ ? rate_ : 0.0;
    }

    ControlInput u = approach_input(ctx, false);
    const Pose& pose = ctx.state.pose;
    const Vec3 correction = -gravity_torque(pose, cfg.body, cfg.g);
    const Vec3 y_rolled(0.0, std::cos(pose.alpha), std::sin(pose.alpha));
    u.tau1 = cfg.control.kp_ang * (a_ref - pose.alpha) +
             cfg.control.kd_ang * (a_rate - ctx.state.alpha_dot) + correction.x();
    u.tau2 = cfg.control.kp_ang * (0.0 - pose.beta) +
             cfg.control.kd_ang * (0.0 - ctx.state.beta_dot) +
             correction.dot(y_rolled);
    u = clamp_input(u, cfg.limits, limits_);
    const Phase phase = ctx.t >= ramp_start_ ? Phase::kTracking : Phase::kApproach;
    return ControlDecision{u, true, phase};
  }

 private:
  bool limits_;
  double alpha_cmd_;
  double rate_;
  double rollback_x_;
  double ramp_start_ = 0.0;
  double t_down_ = -1.0;
};

class ForceFeedbackController {
 public:
  ForceFeedbackController(const WorldConfig& cfg, const Strategy& st,
                          std::uint64_t seed, StrategyRunResult* out)
      : limits_(st.limits_enabled), seed_(seed), out_(out) {
    (void)cfg;
  }

  double t_c() const { return t_c_; }
  double t_s() const { return t_s_; }

  ControlDecision operator()(const StepContext& ctx) {
    switch (mode_) {
      case Mode::kApproach: {
        scan_for_contact(ctx);
        if (mode_ != Mode::kDelay)
          return ControlDecision{approach_input(ctx, limits_), false, Phase::kApproach};
        [[fallthrough]];
      }
      case Mode::kDelay: {
        if (ctx.t < t_s_)
          return ControlDecision{approach_input(ctx, limits_), false, Phase::kDelay};
        hand_over(ctx);
        if (mode_ == Mode::kFallback)
          return ControlDecision{approach_input(ctx, limits_), false, Phase::kApproach};
        return track(ctx);
      }
      case Mode::kTrack:
        return track(ctx);
      case Mode::kFallback:
      default:
        return ControlDecision{approach_input(ctx, limits_), false, Phase::kApproach};
    }
  }

 private:
  enum class Mode { kApproach, kDelay, kTrack, kFallback };

  void scan_for_contact(const StepContext& ctx) {
    const double threshold = ctx.config.sensor.threshold;
    while (scan_ + 1 < ctx.sensor.size()) {
      if (ctx.sensor[scan_].force.norm() > threshold &&
          ctx.sensor[scan_ + 1].force.norm() > threshold) {
        t_c_ = ctx.sensor[scan_].t;
        t_s_ = t_c_ + ctx.config.delays.delay;
        mode_ = Mode::kDelay;
        return;
      }
      ++scan_;
    }
  }

  void hand_over(const StepContext& ctx) {
    const WorldConfig& cfg = ctx.config;
    // Forces enter the fit only from the sensing window; the pose series
    // keeps every tick recorded so far so the estimator's finite-difference
    // deflection rates get context on both sides of the window.
    std::vector<ForceSample> forces;
    std::vector<PoseSample> poses;
    for (const SensorSample& s : ctx.sensor) {
      poses.push_back({s.t, s.pose});
      if (s.t < t_c_ || s.t >= t_c_ + cfg.delays.sensing_time) continue;
      forces.push_back({s.t, s.force});
    }
    const EstimateResult est = estimate_stiffness(
        forces, poses, cfg, Rng::derive(seed_, kEstimatorStream));
    out_->estimate = est;
    if (est.insufficient_contact) {
      out_->fell_back_to_feedforward = true;
      out_->warnings.push_back(
          "insufficient contact samples in the sensing window; continuing feedforward");
      mode_ = Mode::kFallback;
      return;
    }
    k_hat_ = {est.k1, est.k2};
    const EnergyLandscape landscape =
        build_landscape(est.k1, est.k2, cfg.grid, cfg);
    try {
      traj_ = plan_path(landscape, ctx.state.pose, cfg, ctx.t);
    } catch (const std::runtime_error& e) {
      out_->fell_back_to_feedforward = true;
      out_->warnings.push_back(std::string("planning failed: ") + e.what());
      mode_ = Mode::kFallback;
      return;
    }
    out_->plan = traj_;
    t_track_ = ctx.t;
    y_freeze_ = ctx.state.pose.Y;
    z_freeze_ = ctx.state.pose.Z;
    theta_prev_valid_ = false;
    ref_valid_ = false;
    mode_ = Mode::kTrack;
  }

  ControlDecision track(const StepContext& ctx) {
    const WorldConfig& cfg = ctx.config;
    const Pose& pose = ctx.state.pose;

    // Predicted quasistatic contact wrench at the estimated stiffness, with
    // deflection rates from differencing the closure deflection per step.
    ContactWrench wrench;
    const Vec3 center = pose.center();
    std::array<double, 2> theta_now{0.0, 0.0};
    for (int b = 0; b < 2; ++b) {
      const ContactGeometry geom =
          compute_contact_geometry(pose, cfg.beams[b], cfg.body);
      theta_now[b] = geom.theta;
      const double omega_est =
          theta_prev_valid_ ? (geom.theta - theta_prev_[b]) / cfg.dt_control : 0.0;
      const Vec3 f = beam_force_from_geometry(geom, k_hat_[b], cfg.beams[b].c_d,
                                              omega_est, cfg.beams[b], cfg.g);
      wrench.force += f;
      wrench.torque += (geom.point - center).cross(f);
    }
    theta_prev_ = theta_now;
    theta_prev_valid_ = true;

    // Grid plans alternate translation and rotation edges, so the raw
    // piecewise-linear reference would brake and re-accelerate each channel
    // at every edge boundary, dumping kinetic energy each time.  A
    // first-order blend restores the simultaneous motion the grid quantized.
    const PlannedTrajectory::Reference raw = traj_.reference_at(ctx.t);
    if (!ref_valid_) {
      ref_f_ = raw;
      ref_f_.x = pose.X;
      ref_f_.alpha = pose.alpha;
      ref_f_.beta = pose.beta;
      ref_f_.x_dot = ref_f_.alpha_dot = ref_f_.beta_dot = 0.0;
      ref_valid_ = true;
    } else {
      const double a =
          cfg.dt_control / (cfg.control.ref_smooth_time + cfg.dt_control);
      PlannedTrajectory::Reference next = ref_f_;
      next.x += a * (raw.x - ref_f_.x);
      next.alpha += a * (raw.alpha - ref_f_.alpha);
      next.beta += a * (raw.beta - ref_f_.beta);
      next.x_dot = (next.x - ref_f_.x) / cfg.dt_control;
      next.alpha_dot = (next.alpha - ref_f_.alpha) / cfg.dt_control;
      next.beta_dot = (next.beta - ref_f_.beta) / cfg.dt_control;
      ref_f_ = next;
    }

    ControlInput u = tracking_input(ctx.state, ref_f_, wrench, cfg);
    // Carriage: blend from the frozen oscillation value to parked (0, H).
    const double w = std::min(1.0, (ctx.t - t_track_) / kFreezeBlend);
    u.y_des = (1.0 - w) * y_freeze_;
    u.z_des = cfg.body.H + (1.0 - w) * (z_freeze_ - cfg.body.H);
    u = clamp_input(u, cfg.limits, limits_);
    return ControlDecision{u, true, Phase::kTracking};
  }

  bool limits_;
  std::uint64_t seed_;
  StrategyRunResult* out_;
  Mode mode_ = Mode::kApproach;
  double t_c_ = -1.0, t_s_ = -1.0, t_track_ = -1.0;
  std::size_t scan_ = 0;
  PlannedTrajectory traj_;
  PlannedTrajectory::Reference ref_f_;
  bool ref_valid_ = false;
  std::array<double, 2> k_hat_{0.0, 0.0};
  std::array<double, 2> theta_prev_{0.0, 0.0};
  bool theta_prev_valid_ = false;
  double y_freeze_ = 0.0, z_freeze_ = 0.0;
};

}  // namespace

Strategy make_strategy(const std::string& name) {
  Strategy s;
  s.name = name;
  if (name == "ff") {
    s.kind = StrategyKind::kFeedforward;
    s.limits_enabled = false;
  } else if (name == "ff-limited") {
    s.kind = StrategyKind::kFeedforward;
    s.limits_enabled = true;
  } else if (name == "avoid") {
    s.kind = StrategyKind::kAvoidance;
    s.limits_enabled = true;
  } else if (name == "force-feedback") {
    s.kind = StrategyKind::kForceFeedback;
    s.limits_enabled = true;
  } else {
    throw std::invalid_argument("unknown strategy: " + name);
  }
  return s;
}

ControlCallback make_feedforward_callback(bool limits_enabled) {
  return FeedforwardController(limits_enabled);
}

std::optional<double> detect_contact(const std::vector<ForceSample>& samples,
                                     double threshold) {
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (samples[i].force.norm() > threshold &&
        samples[i + 1].force.norm() > threshold)
      return samples[i].t;
  }
  return std::nullopt;
}

ControlInput clamp_input(const ControlInput& u, const InputLimits& limits,
                         bool enabled) {
  if (!enabled) return u;
  ControlInput out = u;
  out.f_x = clamp_abs(u.f_x, limits.f_x_max);
  out.tau1 = clamp_abs(u.tau1, limits.tau1_max);
  out.tau2 = clamp_abs(u.tau2, limits.tau2_max);
  return out;
}

ControlInput tracking_input(const RobotState& state,
                            const PlannedTrajectory::Reference& ref,
                            const ContactWrench& contact_compensation,
                            const WorldConfig& config) {
  const ControlParams& gains = config.control;
  const Pose& pose = state.pose;
  ControlInput u;
  u.f_x = gains.kp_x * (ref.x - pose.X) + gains.kd_x * (ref.x_dot - state.v_x) -
          contact_compensation.force.x();
  const Vec3 correction =
      -(gravity_torque(pose, config.body, config.g) + contact_compensation.torque);
  const Vec3 y_rolled(0.0, std::cos(pose.alpha), std::sin(pose.alpha));
  u.tau1 = gains.kp_ang * (ref.alpha - pose.alpha) +
           gains.kd_ang * (ref.alpha_dot - state.alpha_dot) + correction.x();
  u.tau2 = gains.kp_ang * (ref.beta - pose.beta) +
           gains.kd_ang * (ref.beta_dot - state.beta_dot) +
           correction.dot(y_rolled);
  return u;
}

StrategyRunResult run_strategy(const Strategy& strategy, const WorldConfig& config,
                               std::uint64_t seed) {
  WorldConfig cfg = config;
  // The oscillation is force-feedback's sensing stimulus: enable it for that
  // strategy even when the scenario config leaves it off.
  if (strategy.kind == StrategyKind::kForceFeedback) cfg.oscillation.enabled = true;
  if (cfg.oscillation.enabled) {
    cfg.oscillation.seed = Rng::derive(seed, kOscillationStream);
    cfg.oscillation.vertical =
        make_vertical_oscillation(cfg.oscillation.frequency, cfg.oscillation.seed);
  }
  validate(cfg);
  require_stiffness(cfg);

  StrategyRunResult result;
  switch (strategy.kind) {
    case StrategyKind::kFeedforward: {
      FeedforwardController ctl(strategy.limits_enabled);
      result.log = run_episode(cfg, ctl);
      break;
    }
    case StrategyKind::kAvoidance: {
      AvoidanceController ctl(cfg, strategy);
      result.log = run_episode(cfg, std::ref(ctl));
      break;
    }
    case StrategyKind::kForceFeedback: {
      ForceFeedbackController ctl(cfg, strategy, seed, &result);
      result.log = run_episode(cfg, std::ref(ctl));
      if (ctl.t_c() >= 0.0) result.log.events.t_c = ctl.t_c();
      if (ctl.t_s() >= 0.0 && !result.fell_back_to_feedforward)
        result.log.events.t_s = ctl.t_s();
      break;
    }
  }
  return result;
}

}  // namespace beamsim
