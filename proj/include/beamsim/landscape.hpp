#pragma once

#include <vector>

#include "beamsim/geometry.hpp"
#include "beamsim/params.hpp"

namespace beamsim {

/// Center-of-mass height for a body whose rotation center sits at Z_O with
/// the CoM h_c below it along body -z.
double com_height(double z_center, double alpha, double beta, double h_c);

/// Total potential energy (J) of body + both beams at carriage-nominal
/// Y = 0, Z = H: body gravity plus, per beam, spring energy at the
/// kinematically required deflection and the beam's own CoM gravity.
/// +infinity where closure would need deflection past horizontal.
double energy_at(double x, double alpha, double beta, double k1, double k2,
                 const WorldConfig& config);

/// Dense potential-energy grid over (X, alpha, beta), X-major layout:
/// flat index (ix * na + ia) * na + ib.
struct EnergyLandscape {
  GridSpec spec;
  double k1 = 0.0, k2 = 0.0;
  std::vector<double> values;

  int nx() const { return spec.nx(); }
  int na() const { return spec.na(); }
  std::size_t index(int ix, int ia, int ib) const {
    return (static_cast<std::size_t>(ix) * static_cast<std::size_t>(spec.na()) +
            static_cast<std::size_t>(ia)) *
               static_cast<std::size_t>(spec.na()) +
           static_cast<std::size_t>(ib);
  }
  double at(int ix, int ia, int ib) const { return values[index(ix, ia, ib)]; }
  double x_of(int ix) const { return spec.x_min + ix * spec.x_step; }
  double alpha_of(int ia) const { return spec.ang_min + ia * spec.ang_step; }
  double beta_of(int ib) const { return spec.ang_min + ib * spec.ang_step; }
  int nearest_x(double x) const;
  int nearest_ang(double ang) const;
};

EnergyLandscape build_landscape(double k1, double k2, const GridSpec& spec,
                                const WorldConfig& config, int n_threads = 0);

/// Pitch-through vs roll-through energy barriers for symmetric stiffness k:
/// pitch pays the spring energy of both beams at the flat-pose closure
/// deflection arccos(H/L); roll pays lifting the CoM offset upright.
struct ModeBarriers {
  double pe_pitch = 0.0;  // J
  double pe_roll = 0.0;   // J
};
ModeBarriers mode_barriers(double k, const WorldConfig& config);

/// Stiffness where the two barriers cross: M g h_c / arccos(H/L)^2.
double critical_stiffness(const WorldConfig& config);

/// Smallest roll magnitude that clears both upright beams at every grid X
/// (Y = 0, Z = H, beta = 0): coarse 0.5 degree scan refined by bisection to
/// 0.05 degree.
double min_clearance_roll(const WorldConfig& config);

}  // namespace beamsim
