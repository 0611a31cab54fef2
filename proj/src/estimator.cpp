#include "beamsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamsim/rng.hpp"

namespace beamsim {
namespace {

constexpr double kNegativePenalty = 1e6;

/// Stream id separating estimator restart draws from other seeded draws.
constexpr std::uint64_t kRestartStream = 0x00e5;

}  // namespace

SimplexResult simplex_minimize(const std::function<double(const Vec2&)>& f,
                               const Vec2& x0, double tol, int max_iter) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::array<Vec2, 3> v;
  std::array<double, 3> fv;
  v[0] = x0;
  for (int d = 0; d < 2; ++d) {
    Vec2 p = x0;
    p[d] = (p[d] != 0.0) ? 1.05 * p[d] : 2.5e-4;
    v[d + 1] = p;
  }
  for (int i = 0; i < 3; ++i) fv[i] = f(v[i]);

  auto order = [&] {
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const std::array<Vec2, 3> pv = v;
    const std::array<double, 3> pf = fv;
    for (int i = 0; i < 3; ++i) {
      v[i] = pv[idx[i]];
      fv[i] = pf[idx[i]];
    }
  };
  order();

  SimplexResult res;
  while (true) {
    const double diameter = std::max((v[1] - v[0]).norm(), (v[2] - v[0]).norm());
    if (diameter < tol) {
      res.reason = SimplexStop::kDiameter;
      break;
    }
    if (std::abs(fv[2] - fv[0]) <= 1e-12 * std::max(1.0, std::abs(fv[0]))) {
      res.reason = SimplexStop::kFlat;
      break;
    }
    if (res.iterations >= max_iter) {
      res.reason = SimplexStop::kMaxIterations;
      break;
    }
    ++res.iterations;

    const Vec2 centroid = 0.5 * (v[0] + v[1]);
    const Vec2 xr = centroid + kReflect * (centroid - v[2]);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Vec2 xe = centroid + kExpand * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
    } else {
      bool shrink = false;
      if (fr < fv[2]) {
        const Vec2 xc = centroid + kContract * (xr - centroid);
        const double fc = f(xc);
        if (fc <= fr) {
          v[2] = xc;
          fv[2] = fc;
        } else {
          shrink = true;
        }
      } else {
        const Vec2 xc = centroid - kContract * (centroid - v[2]);
        const double fc = f(xc);
        if (fc < fv[2]) {
          v[2] = xc;
          fv[2] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (int i = 1; i < 3; ++i) {
          v[i] = v[0] + kShrink * (v[i] - v[0]);
          fv[i] = f(v[i]);
        }
      }
    }
    order();
  }

  res.x = v[0];
  res.value = fv[0];
  return res;
}

double estimation_objective(const std::vector<ForceSample>& forces,
                            const SeriesGeometry& series, const Vec2& k,
                            const WorldConfig& config) {
  double total = 0.0;
  for (size_t i = 0; i < forces.size(); ++i) {
    Vec3 predicted = Vec3::Zero();
    if (series.usable[i]) {
      for (int b = 0; b < 2; ++b)
        predicted += beam_force_from_geometry(series.geo[i][b], k[b],
                                              config.beams[b].c_d,
                                              series.omega_est[i][b],
                                              config.beams[b], config.g);
    }
    total += (forces[i].force - predicted).norm();
  }
  const double n1 = std::min(k[0], 0.0), n2 = std::min(k[1], 0.0);
  return total + kNegativePenalty * (n1 * n1 + n2 * n2);
}

EstimateResult estimate_stiffness(const std::vector<ForceSample>& forces,
                                  const std::vector<PoseSample>& poses,
                                  const WorldConfig& config, std::uint64_t seed,
                                  int restarts) {
  if (forces.empty() || poses.empty())
    throw std::invalid_argument("estimate_stiffness: empty sample window");

  // Pair each force sample with the nearest-in-time pose sample (earlier
  // sample wins a tie). Poses must be time-sorted.
  std::vector<size_t> matched;
  matched.reserve(forces.size());
  for (const ForceSample& fs : forces) {
    const auto it = std::lower_bound(
        poses.begin(), poses.end(), fs.t,
        [](const PoseSample& p, double t) { return p.t < t; });
    size_t j = static_cast<size_t>(it - poses.begin());
    if (j == poses.size()) {
      j = poses.size() - 1;
    } else if (j > 0 && fs.t - poses[j - 1].t <= poses[j].t - fs.t) {
      --j;
    }
    matched.push_back(j);
  }

  // Deflection rates come from finite differences over the whole pose
  // series, so context samples outside the force window (when the caller
  // supplies them) sharpen the rate estimates at the window edges.
  const SeriesGeometry full = compute_series_geometry(poses, config);
  SeriesGeometry series;
  series.geo.reserve(matched.size());
  series.omega_est.reserve(matched.size());
  series.usable.reserve(matched.size());
  for (const size_t j : matched) {
    series.geo.push_back(full.geo[j]);
    series.omega_est.push_back(full.omega_est[j]);
    series.usable.push_back(full.usable[j]);
  }

  EstimateResult out;
  out.restarts = restarts;
  for (const ForceSample& fs : forces)
    if (fs.force.norm() > config.sensor.threshold) ++out.samples_in_contact;
  out.insufficient_contact = out.samples_in_contact < 3;

  const auto objective = [&](const Vec2& k) {
    return estimation_objective(forces, series, k, config);
  };

  Rng rng(Rng::derive(seed, kRestartStream));
  std::vector<Vec2> starts(static_cast<size_t>(restarts));
  for (Vec2& s : starts) {
    s.x() = rng.uniform(0.0, 5.0);
    s.y() = rng.uniform(0.0, 5.0);
  }

  double best = std::numeric_limits<double>::infinity();
  Vec2 best_x = Vec2::Zero();
  for (int r = 0; r < restarts; ++r) {
    const SimplexResult sr = simplex_minimize(objective, starts[static_cast<size_t>(r)]);
    if (sr.value < best) {
      best = sr.value;
      best_x = sr.x;
      out.best_restart = r;
    }
  }

  out.k1 = std::max(0.0, best_x.x());
  out.k2 = std::max(0.0, best_x.y());
  out.residual = objective(Vec2(out.k1, out.k2));
  return out;
}

std::vector<PoseSample> corrupt_poses(const std::vector<PoseSample>& poses,
                                      CorruptionMode mode) {
  std::vector<PoseSample> out = poses;
  switch (mode) {
    case CorruptionMode::kZeroLateral:
      for (PoseSample& p : out) p.pose.Y = 0.0;
      break;
  }
  return out;
}

}  // namespace beamsim
