#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamsim/engine.hpp"
#include "beamsim/estimator.hpp"
#include "beamsim/landscape.hpp"
#include "beamsim/params.hpp"
#include "beamsim/planner.hpp"

namespace beamsim {

enum class StrategyKind { kFeedforward, kAvoidance, kForceFeedback };

/// Traversal strategy. The four named presets ("ff", "ff-limited", "avoid",
/// "force-feedback") differ in kind and limit handling; timing and gain
/// numbers come from the config.
struct Strategy {
  StrategyKind kind = StrategyKind::kFeedforward;
  bool limits_enabled = false;
  std::string name = "ff";
  /// Avoidance: safety factor on the minimum clearing roll (the strategy
  /// never learns the beam stiffness, so it over-rotates proportionally to
  /// stay clear under uncertainty), and how long before projected beam
  /// arrival the roll ramp starts.
  double roll_safety = 1.5;
  double roll_lead_time = 2.0;  // s
};

/// Presets: ff (no limits), ff-limited, avoid, force-feedback (all limited).
/// Throws std::invalid_argument for unknown names.
Strategy make_strategy(const std::string& name);

/// First time the force magnitude exceeds the threshold on two consecutive
/// samples (debounce); nullopt when it never does.
std::optional<double> detect_contact(const std::vector<ForceSample>& samples,
                                     double threshold);

/// Per-component saturation of the actuated inputs; carriage commands pass
/// through. Identity when not enabled.
ControlInput clamp_input(const ControlInput& u, const InputLimits& limits,
                         bool enabled);

/// Plain approach behavior as a reusable episode callback: fore-aft
/// velocity servo, free joints, carriage on the oscillation profile.
ControlCallback make_feedforward_callback(bool limits_enabled);

/// Model-based PD tracking: PD on (X, alpha, beta) errors plus gravity and
/// predicted-contact compensation projected on the joint axes. Carriage
/// commands are left at zero for the caller to fill.
ControlInput tracking_input(const RobotState& state,
                            const PlannedTrajectory::Reference& ref,
                            const ContactWrench& contact_compensation,
                            const WorldConfig& config);

struct StrategyRunResult {
  EpisodeLog log;
  std::optional<EstimateResult> estimate;   // force-feedback only
  std::optional<PlannedTrajectory> plan;    // force-feedback only
  bool fell_back_to_feedforward = false;
  std::vector<std::string> warnings;
};

/// Runs one episode under the given strategy. The seed drives the vertical
/// oscillation draw and the estimator restarts; identical (strategy, config,
/// seed) reruns are bit-identical. Force-feedback enables the carriage
/// oscillation during approach/sensing (it is the sensing stimulus) even
/// when the config leaves it off, and freezes it once tracking begins.
/// Outcome classification and the energy metric are filled by the caller
/// (see experiments).
StrategyRunResult run_strategy(const Strategy& strategy, const WorldConfig& config,
                               std::uint64_t seed);

}  // namespace beamsim
