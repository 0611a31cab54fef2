#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beamsim/landscape.hpp"

using namespace beamsim;

namespace {
WorldConfig make_config() {
  WorldConfig c;
  c.beams[0].k = 0.5;
  c.beams[1].k = 0.5;
  validate(c);
  return c;
}

// Closed-form reference values, computed independently of the code under
// test: flat-attitude clear-field energy and the barrier-crossing stiffness.
constexpr double kFlatEnergy = 0.93347055;            // J
constexpr double kThetaFlat = 0.826547616989;         // rad, arccos(H / L)
constexpr double kCritical = 0.143592994084;          // N*m/rad
}  // namespace

TEST_CASE("clear-field energy matches the closed form to 1e-9") {
  const WorldConfig c = make_config();
  CHECK(std::abs(energy_at(-0.12, 0.0, 0.0, 0.5, 0.5, c) - kFlatEnergy) < 1e-9);
  CHECK(std::abs(energy_at(+0.12, 0.0, 0.0, 0.5, 0.5, c) - kFlatEnergy) < 1e-9);
  // Independent of stiffness when nothing deflects.
  CHECK(std::abs(energy_at(-0.12, 0.0, 0.0, 0.01, 3.0, c) - kFlatEnergy) < 1e-9);
}

TEST_CASE("center-of-mass height follows the tilt cosine") {
  CHECK(com_height(0.105, 0.0, 0.0, 0.01) == doctest::Approx(0.095).epsilon(1e-12));
  CHECK(com_height(0.105, kPi / 2.0, 0.0, 0.01) ==
        doctest::Approx(0.105).epsilon(1e-9));
  CHECK(com_height(0.105, 0.3, -0.2, 0.01) ==
        doctest::Approx(0.105 - 0.01 * std::cos(0.3) * std::cos(-0.2)).epsilon(1e-12));
}

TEST_CASE("every finite cell sits above the rigid-body lower bound") {
  const WorldConfig c = make_config();
  GridSpec spec;  // coarser scan keeps the test quick but spans the space
  spec.x_step = 0.006;
  spec.ang_step = deg2rad(6.0);
  const EnergyLandscape land = build_landscape(0.2, 0.2, spec, c);
  const double bound = c.body.mass * c.g * (c.body.H - c.body.h_c);
  int finite = 0, infinite = 0;
  for (const double e : land.values) {
    if (std::isfinite(e)) {
      ++finite;
      CHECK(e >= bound - 1e-12);
    } else {
      ++infinite;
    }
  }
  CHECK(finite > 0);
  CHECK(finite + infinite == static_cast<int>(land.values.size()));
  // The grid extremes lie beyond the body's reach: those columns are all
  // finite and exactly at the clear-field level.
  for (int ia = 0; ia < land.na(); ++ia)
    for (int ib = 0; ib < land.na(); ++ib) {
      CHECK(std::isfinite(land.at(0, ia, ib)));
      CHECK(std::isfinite(land.at(land.nx() - 1, ia, ib)));
    }
}

TEST_CASE("symmetric stiffness gives a roll-mirrored landscape") {
  const WorldConfig c = make_config();
  for (const double x : {-0.06, -0.03, 0.0, 0.04}) {
    for (const double a : {0.1, 0.35, 0.8}) {
      for (const double b : {-0.2, 0.0, 0.15}) {
        const double e_pos = energy_at(x, +a, b, 0.3, 0.3, c);
        const double e_neg = energy_at(x, -a, b, 0.3, 0.3, c);
        if (std::isfinite(e_pos) || std::isfinite(e_neg)) {
          REQUIRE(std::isfinite(e_pos) == std::isfinite(e_neg));
          if (std::isfinite(e_pos)) CHECK(std::abs(e_pos - e_neg) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("landscape grid layout matches the declared indexing") {
  const WorldConfig c = make_config();
  GridSpec spec;
  spec.x_min = -0.01;
  spec.x_max = 0.01;
  spec.x_step = 0.01;
  spec.ang_min = deg2rad(-4.0);
  spec.ang_max = deg2rad(4.0);
  spec.ang_step = deg2rad(4.0);
  const EnergyLandscape land = build_landscape(0.5, 0.5, spec, c);
  REQUIRE(land.nx() == 3);
  REQUIRE(land.na() == 3);
  REQUIRE(land.values.size() == 27u);
  for (int ix = 0; ix < 3; ++ix)
    for (int ia = 0; ia < 3; ++ia)
      for (int ib = 0; ib < 3; ++ib) {
        const double direct = energy_at(land.x_of(ix), land.alpha_of(ia),
                                        land.beta_of(ib), 0.5, 0.5, c);
        const double stored = land.at(ix, ia, ib);
        if (std::isfinite(direct))
          CHECK(stored == direct);
        else
          CHECK_FALSE(std::isfinite(stored));
      }
  CHECK(land.nearest_x(-0.0106) == 0);
  CHECK(land.nearest_x(0.006) == 2);
  CHECK(land.nearest_ang(0.0) == 1);
  CHECK(land.nearest_ang(1.0) == 2);  // clamped to the grid edge
}

TEST_CASE("mode barriers take the published forms and cross at the critical k") {
  const WorldConfig c = make_config();
  const double k = 0.2;
  const ModeBarriers b = mode_barriers(k, c);
  CHECK(b.pe_pitch == doctest::Approx(k * kThetaFlat * kThetaFlat).epsilon(1e-9));
  CHECK(b.pe_roll ==
        doctest::Approx(c.body.mass * c.g * c.body.h_c).epsilon(1e-12));

  const double k0 = critical_stiffness(c);
  CHECK(k0 == doctest::Approx(kCritical).epsilon(1e-9));
  const ModeBarriers at_k0 = mode_barriers(k0, c);
  CHECK(std::abs(at_k0.pe_pitch - at_k0.pe_roll) < 1e-9);
  CHECK(mode_barriers(0.9 * k0, c).pe_pitch < at_k0.pe_roll);
  CHECK(mode_barriers(1.1 * k0, c).pe_pitch > at_k0.pe_roll);
}

TEST_CASE("critical stiffness sits within 5 percent of the reference value") {
  const WorldConfig c = make_config();
  CHECK(std::abs(critical_stiffness(c) / 0.146 - 1.0) < 0.05);
}

TEST_CASE("minimum clearing roll is between the barrier angles") {
  const WorldConfig c = make_config();
  const double a_min = min_clearance_roll(c);
  CHECK(a_min > deg2rad(30.0));
  CHECK(a_min < deg2rad(36.0));
  // Clearing roll is attitude geometry only: independent of stiffness.
  WorldConfig c2 = make_config();
  c2.beams[0].k = 5.0;
  c2.beams[1].k = 5.0;
  CHECK(min_clearance_roll(c2) == a_min);
}
