#include "beamsim/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamsim/parallel.hpp"

namespace beamsim {

double com_height(double z_center, double alpha, double beta, double h_c) {
  return z_center - h_c * std::cos(alpha) * std::cos(beta);
}

double energy_at(double x, double alpha, double beta, double k1, double k2,
                 const WorldConfig& config) {
  const BodyParams& body = config.body;
  const Pose pose{x, 0.0, body.H, alpha, beta};
  const double k[2] = {k1, k2};
  double energy =
      body.mass * config.g * com_height(body.H, alpha, beta, body.h_c);
  for (int i = 0; i < 2; ++i) {
    const BeamParams& beam = config.beams[i];
    const DeflectionResult d =
        beam_deflection_required(pose, beam, body, BeamShape::kMidplane);
    if (d.over_deflected) return std::numeric_limits<double>::infinity();
    energy += 0.5 * beam.mass * config.g * beam.length * std::cos(d.theta) +
              0.5 * k[i] * d.theta * d.theta;
  }
  return energy;
}

int EnergyLandscape::nearest_x(double x) const {
  const int i = static_cast<int>(std::lround((x - spec.x_min) / spec.x_step));
  return std::clamp(i, 0, spec.nx() - 1);
}

int EnergyLandscape::nearest_ang(double ang) const {
  const int i = static_cast<int>(std::lround((ang - spec.ang_min) / spec.ang_step));
  return std::clamp(i, 0, spec.na() - 1);
}

EnergyLandscape build_landscape(double k1, double k2, const GridSpec& spec,
                                const WorldConfig& config, int n_threads) {
  EnergyLandscape ls;
  ls.spec = spec;
  ls.k1 = k1;
  ls.k2 = k2;
  const int nx = spec.nx(), na = spec.na();
  ls.values.assign(static_cast<std::size_t>(nx) * na * na, 0.0);

  parallel_for(
      static_cast<std::size_t>(nx),
      [&](std::size_t ix) {
        const double x = ls.x_of(static_cast<int>(ix));
        for (int ia = 0; ia < na; ++ia) {
          const double alpha = ls.alpha_of(ia);
          for (int ib = 0; ib < na; ++ib) {
            ls.values[ls.index(static_cast<int>(ix), ia, ib)] =
                energy_at(x, alpha, ls.beta_of(ib), k1, k2, config);
          }
        }
      },
      n_threads);
  return ls;
}

ModeBarriers mode_barriers(double k, const WorldConfig& config) {
  const double theta_flat = std::acos(config.body.H / config.beams[0].length);
  ModeBarriers b;
  b.pe_pitch = k * theta_flat * theta_flat;  // both beams, ½kθ² each
  b.pe_roll = config.body.mass * config.g * config.body.h_c;
  return b;
}

double critical_stiffness(const WorldConfig& config) {
  if (config.body.H >= config.beams[0].length)
    throw std::invalid_argument("critical_stiffness: beams shorter than ride height");
  const double theta_flat = std::acos(config.body.H / config.beams[0].length);
  return config.body.mass * config.g * config.body.h_c / (theta_flat * theta_flat);
}

namespace {

/// True when the body at roll alpha (beta = 0, carriage nominal) clears both
/// upright beams over the whole landscape X range.
bool roll_clears(double alpha, const WorldConfig& config) {
  const GridSpec& spec = config.grid;
  const int nx = spec.nx();
  for (int ix = 0; ix < nx; ++ix) {
    const Pose pose{spec.x_min + ix * spec.x_step, 0.0, config.body.H, alpha, 0.0};
    for (const BeamParams& beam : config.beams) {
      if (ellipsoid_beam_clearance(pose, 0.0, beam, config.body).clearance < 0.0)
        return false;
    }
  }
  return true;
}

}  // namespace

double min_clearance_roll(const WorldConfig& config) {
  const double coarse = deg2rad(0.5), fine = deg2rad(0.05);
  double lo = 0.0;
  if (roll_clears(lo, config)) return 0.0;
  double hi = lo;
  do {
    lo = hi;
    hi += coarse;
    if (hi > 0.5 * kPi)
      throw std::runtime_error("min_clearance_roll: no clearing roll below 90 degrees");
  } while (!roll_clears(hi, config));
  while (hi - lo > fine) {
    const double mid = 0.5 * (lo + hi);
    (roll_clears(mid, config) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace beamsim
