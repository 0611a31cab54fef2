#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamsim/landscape.hpp"

namespace beamsim {

struct GridNode {
  int ix = 0, ia = 0, ib = 0;
  bool operator==(const GridNode&) const = default;
};

/// Uphill-only edge cost between adjacent cells: positive energy gain,
/// downhill free.
double edge_cost(double e_from, double e_to);

struct SearchResult {
  std::vector<GridNode> path;  // start .. goal inclusive
  double cost = 0.0;           // J, sum of positive energy gains
  std::size_t expanded = 0;
};

/// A* over the 6-connected (X, alpha, beta) grid with admissible heuristic
/// max(E_goal - E_node, 0). Ties in f are broken toward fewer obstacle-contact
/// cells along the path (secondary objective; never changes the returned
/// cost), then toward the lexicographically smaller (ix, ia, ib), so the
/// returned path is deterministic. `contact_mask`, when given, marks the
/// cells counted by the secondary objective (size must match the landscape);
/// otherwise cells are compared against the first X column, which lies
/// beyond the body's reach for every orientation. Empty result when no
/// finite-energy path exists.
std::optional<SearchResult> astar(const EnergyLandscape& landscape, GridNode start,
                                  GridNode goal,
                                  const std::vector<char>* contact_mask = nullptr);

/// Independent uphill-sum of an explicit path, for cross-checking.
double path_cost(const EnergyLandscape& landscape, const std::vector<GridNode>& path);

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0, alpha = 0.0, beta = 0.0;
};

struct PlannedTrajectory {
  std::vector<GridNode> nodes;
  std::vector<TrajectoryPoint> points;  // time-parameterized waypoints
  double cost = 0.0;                    // J

  struct Reference {
    double x = 0.0, x_dot = 0.0;
    double alpha = 0.0, alpha_dot = 0.0;
    double beta = 0.0, beta_dot = 0.0;
  };
  /// Piecewise-linear interpolation; holds the last waypoint (zero rates)
  /// past the end and the first before the start.
  Reference reference_at(double t) const;
};

/// Per-edge durations |dX| / v_x and |dAngle| / rotation_rate starting at t0.
std::vector<TrajectoryPoint> time_parameterize(const EnergyLandscape& landscape,
                                               const std::vector<GridNode>& nodes,
                                               double v_x, double rotation_rate,
                                               double t0);

/// Plans from a pose to the goal (x_target, 0, 0): snaps both endpoints to
/// the nearest grid cell, hops to the nearest finite cell within 2 cells if
/// the snap lands on an infinite one, then A*. Throws std::runtime_error
/// when snapping or the search fails.
PlannedTrajectory plan_path(const EnergyLandscape& landscape, const Pose& start,
                            const WorldConfig& config, double t0);

}  // namespace beamsim
