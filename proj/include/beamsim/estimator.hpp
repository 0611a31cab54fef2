#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "beamsim/contact_model.hpp"
#include "beamsim/engine.hpp"
#include "beamsim/params.hpp"

namespace beamsim {

enum class SimplexStop { kDiameter, kFlat, kMaxIterations };

struct SimplexResult {
  Vec2 x = Vec2::Zero();
  double value = 0.0;
  int iterations = 0;
  SimplexStop reason = SimplexStop::kDiameter;
};

/// Nelder–Mead on R², coefficients (reflect 1, expand 2, contract 0.5,
/// shrink 0.5). Initial simplex perturbs each coordinate by 5 % (absolute
/// 2.5e-4 for zero coordinates). Stops when the simplex diameter falls
/// below tol, the objective is flat across the simplex, or at max_iter.
SimplexResult simplex_minimize(const std::function<double(const Vec2&)>& f,
                               const Vec2& x0, double tol = 1e-4, int max_iter = 500);

struct EstimateResult {
  double k1 = 0.0, k2 = 0.0;    // N·m/rad, clamped >= 0
  double residual = 0.0;        // objective at the reported estimate
  int samples_in_contact = 0;   // sensed-force samples above threshold
  bool insufficient_contact = false;  // fewer than 3 in-contact samples
  int best_restart = 0;
  int restarts = 0;
};

/// Fits both stiffnesses to a sensed-force window by multi-start
/// Nelder–Mead on sum_i ||F_sensed_i - F_model_i(k)|| with a quadratic
/// penalty (weight 1e6) on negative stiffness. Force samples pair with the
/// nearest-in-time pose sample. Restart seeds are drawn deterministically
/// from `seed`: identical inputs give identical estimates.
EstimateResult estimate_stiffness(const std::vector<ForceSample>& forces,
                                  const std::vector<PoseSample>& poses,
                                  const WorldConfig& config, std::uint64_t seed,
                                  int restarts = 100);

/// Objective used by the estimator, exposed for tests.
double estimation_objective(const std::vector<ForceSample>& forces,
                            const SeriesGeometry& series, const Vec2& k,
                            const WorldConfig& config);

enum class CorruptionMode { kZeroLateral };

/// Sensor-degradation model for robustness studies: kZeroLateral erases the
/// lateral coordinate of every pose (as if the Y encoder were unread).
std::vector<PoseSample> corrupt_poses(const std::vector<PoseSample>& poses,
                                      CorruptionMode mode);

}  // namespace beamsim
