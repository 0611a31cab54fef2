#include "beamsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace beamsim {

double edge_cost(double e_from, double e_to) { return std::max(e_to - e_from, 0.0); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HeapEntry {
  double f = 0.0;
  double g2 = 0.0;
  std::int64_t idx = 0;
  // Min-heap on f; equal f resolves toward fewer contact cells (secondary
  // objective), then toward the smaller flat index, which is lexicographic
  // (ix, ia, ib) order for the X-major layout.
  bool operator<(const HeapEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g2 != o.g2) return g2 > o.g2;
    return idx > o.idx;
  }
};

}  // namespace

std::optional<SearchResult> astar(const EnergyLandscape& landscape, GridNode start,
                                  GridNode goal,
                                  const std::vector<char>* contact_mask) {
  const int nx = landscape.nx(), na = landscape.na();
  const auto in_bounds = [&](const GridNode& n) {
    return n.ix >= 0 && n.ix < nx && n.ia >= 0 && n.ia < na && n.ib >= 0 && n.ib < na;
  };
  if (!in_bounds(start) || !in_bounds(goal)) return std::nullopt;

  const std::size_t total = landscape.values.size();
  const auto flat = [&](const GridNode& n) {
    return static_cast<std::int64_t>(landscape.index(n.ix, n.ia, n.ib));
  };
  const auto unflat = [&](std::int64_t i) {
    const int ib = static_cast<int>(i % na);
    const int ia = static_cast<int>((i / na) % na);
    const int ix = static_cast<int>(i / (static_cast<std::int64_t>(na) * na));
    return GridNode{ix, ia, ib};
  };

  const std::int64_t s = flat(start), t = flat(goal);
  if (!std::isfinite(landscape.values[static_cast<std::size_t>(s)]) ||
      !std::isfinite(landscape.values[static_cast<std::size_t>(t)]))
    return std::nullopt;
  const double e_goal = landscape.values[static_cast<std::size_t>(t)];
  const auto heuristic = [&](std::int64_t i) {
    return std::max(e_goal - landscape.values[static_cast<std::size_t>(i)], 0.0);
  };

  // Secondary objective: among minimum-energy paths, prefer the one that
  // spends the fewest cells interacting with the obstacles.  Minimum-energy
  // plans tie exactly when their uphill segments telescope over the same
  // orientation cells; this places the tied rotation where the path stays
  // clear, which tracks with far less wasted actuator work.  Without an
  // explicit mask, a cell counts as contact when its energy differs from the
  // first X column at the same orientation; that column lies beyond the
  // body's reach for every orientation, so the difference isolates the
  // obstacle-interaction energy.
  std::vector<char> in_contact;
  if (contact_mask != nullptr && contact_mask->size() == total) {
    in_contact = *contact_mask;
  } else {
    in_contact.assign(total, 0);
    for (std::size_t i = 0; i < total; ++i) {
      const double e = landscape.values[i];
      const double e_free = landscape.values[i % (static_cast<std::size_t>(na) * na)];
      in_contact[i] = std::isfinite(e) && std::isfinite(e_free) &&
                              std::abs(e - e_free) > 1e-9
                          ? 1
                          : 0;
    }
  }

  std::vector<double> dist(total, kInf);
  std::vector<double> dist2(total, kInf);
  std::vector<std::int64_t> parent(total, -1);
  std::vector<char> closed(total, 0);
  std::priority_queue<HeapEntry> open;

  dist[static_cast<std::size_t>(s)] = 0.0;
  dist2[static_cast<std::size_t>(s)] = in_contact[static_cast<std::size_t>(s)] ? 1.0 : 0.0;
  open.push({heuristic(s), dist2[static_cast<std::size_t>(s)], s});
  SearchResult result;

  const int steps[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                           {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  bool found = false;
  while (!open.empty()) {
    const HeapEntry top = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(top.idx)]) continue;
    closed[static_cast<std::size_t>(top.idx)] = 1;
    ++result.expanded;
    if (top.idx == t) {
      found = true;
      break;
    }
    const GridNode node = unflat(top.idx);
    const double e_here = landscape.values[static_cast<std::size_t>(top.idx)];
    const double g_here = dist[static_cast<std::size_t>(top.idx)];
    const double g2_here = dist2[static_cast<std::size_t>(top.idx)];
    for (const auto& d : steps) {
      const GridNode nb{node.ix + d[0], node.ia + d[1], node.ib + d[2]};
      if (!in_bounds(nb)) continue;
      const std::int64_t ni = flat(nb);
      if (closed[static_cast<std::size_t>(ni)]) continue;
      const double e_nb = landscape.values[static_cast<std::size_t>(ni)];
      if (!std::isfinite(e_nb)) continue;
      const double g_new = g_here + edge_cost(e_here, e_nb);
      const double g2_new = g2_here + (in_contact[static_cast<std::size_t>(ni)] ? 1.0 : 0.0);
      const bool better =
          g_new < dist[static_cast<std::size_t>(ni)] ||
          (g_new == dist[static_cast<std::size_t>(ni)] &&
           g2_new < dist2[static_cast<std::size_t>(ni)]);
      if (better) {
        dist[static_cast<std::size_t>(ni)] = g_new;
        dist2[static_cast<std::size_t>(ni)] = g2_new;
        parent[static_cast<std::size_t>(ni)] = top.idx;
        open.push({g_new + heuristic(ni), g2_new, ni});
      }
    }
  }
  if (!found) return std::nullopt;

  result.cost = dist[static_cast<std::size_t>(t)];
  for (std::int64_t i = t; i != -1; i = parent[static_cast<std::size_t>(i)])
    result.path.push_back(unflat(i));
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

double path_cost(const EnergyLandscape& landscape, const std::vector<GridNode>& path) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    cost += edge_cost(landscape.at(path[i - 1].ix, path[i - 1].ia, path[i - 1].ib),
                      landscape.at(path[i].ix, path[i].ia, path[i].ib));
  return cost;
}

std::vector<TrajectoryPoint> time_parameterize(const EnergyLandscape& landscape,
                                               const std::vector<GridNode>& nodes,
                                               double v_x, double rotation_rate,
                                               double t0) {
  std::vector<TrajectoryPoint> points;
  points.reserve(nodes.size());
  double t = t0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) {
      const GridNode& p = nodes[i - 1];
      const GridNode& n = nodes[i];
      const int dix = std::abs(n.ix - p.ix);
      const int dang = std::abs(n.ia - p.ia) + std::abs(n.ib - p.ib);
      t += dix * landscape.spec.x_step / v_x +
           dang * landscape.spec.ang_step / rotation_rate;
    }
    points.push_back({t, landscape.x_of(nodes[i].ix), landscape.alpha_of(nodes[i].ia),
                      landscape.beta_of(nodes[i].ib)});
  }
  return points;
}

PlannedTrajectory::Reference PlannedTrajectory::reference_at(double t) const {
  Reference ref;
  if (points.empty()) return ref;
  if (t <= points.front().t) {
    ref.x = points.front().x;
    ref.alpha = points.front().alpha;
    ref.beta = points.front().beta;
    return ref;
  }
  if (t >= points.back().t) {
    ref.x = points.back().x;
    ref.alpha = points.back().alpha;
    ref.beta = points.back().beta;
    return ref;
  }
  const auto it = std::upper_bound(
      points.begin(), points.end(), t,
      [](double value, const TrajectoryPoint& p) { return value < p.t; });
  const TrajectoryPoint& hi = *it;
  const TrajectoryPoint& lo = *(it - 1);
  const double dt = hi.t - lo.t;
  const double w = dt > 0.0 ? (t - lo.t) / dt : 0.0;
  ref.x_dot = dt > 0.0 ? (hi.x - lo.x) / dt : 0.0;
  ref.alpha_dot = dt > 0.0 ? (hi.alpha - lo.alpha) / dt : 0.0;
  ref.beta_dot = dt > 0.0 ? (hi.beta - lo.beta) / dt : 0.0;
  ref.x = lo.x + w * (hi.x - lo.x);
  ref.alpha = lo.alpha + w * (hi.alpha - lo.alpha);
  ref.beta = lo.beta + w * (hi.beta - lo.beta);
  return ref;
}

namespace {

/// Nearest finite cell within a Chebyshev radius of 2: candidates ordered by
/// squared index distance then lexicographic offset, first finite wins.
GridNode snap_to_finite(const EnergyLandscape& landscape, GridNode n) {
  if (std::isfinite(landscape.at(n.ix, n.ia, n.ib))) return n;
  struct Offset {
    int d2;
    int di, da, db;
  };
  std::vector<Offset> offsets;
  for (int di = -2; di <= 2; ++di)
    for (int da = -2; da <= 2; ++da)
      for (int db = -2; db <= 2; ++db)
        offsets.push_back({di * di + da * da + db * db, di, da, db});
  std::sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) {
    return std::tie(a.d2, a.di, a.da, a.db) < std::tie(b.d2, b.di, b.da, b.db);
  });
  for (const Offset& o : offsets) {
    const GridNode c{n.ix + o.di, n.ia + o.da, n.ib + o.db};
    if (c.ix < 0 || c.ix >= landscape.nx() || c.ia < 0 || c.ia >= landscape.na() ||
        c.ib < 0 || c.ib >= landscape.na())
      continue;
    if (std::isfinite(landscape.at(c.ix, c.ia, c.ib))) return c;
  }
  throw std::runtime_error("plan: start pose has no finite-energy cell within 2 cells");
}

}  // namespace

PlannedTrajectory plan_path(const EnergyLandscape& landscape, const Pose& start,
                            const WorldConfig& config, double t0) {
  GridNode s{landscape.nearest_x(start.X), landscape.nearest_ang(start.alpha),
             landscape.nearest_ang(start.beta)};
  s = snap_to_finite(landscape, s);
  const GridNode goal{landscape.nearest_x(config.x_target), landscape.nearest_ang(0.0),
                      landscape.nearest_ang(0.0)};
  if (!std::isfinite(landscape.at(goal.ix, goal.ia, goal.ib)))
    throw std::runtime_error("plan: goal cell has infinite energy");

  // Contact mask for the search's secondary tie-break.  The landscape
  // resolves deflection against the beam mid-plane, but the physical plates
  // have thickness, so real contact begins about half a plate earlier along
  // X; cells within 1 mm of touching the upright plates count as contact so
  // tied plans rotate where the body is genuinely clear of the obstacles.
  std::vector<char> contact_mask(landscape.values.size(), 0);
  // The support half-width along X never exceeds the longest semi-axis, so
  // columns beyond it (plus the plate half-thickness and the 1 mm margin)
  // cannot touch and are skipped wholesale.
  const double reach =
      config.body.a + config.beams[0].thickness / 2.0 + 2e-3;
  for (int ix = 0; ix < landscape.nx(); ++ix) {
    if (std::abs(landscape.x_of(ix)) >= reach) continue;
    for (int ia = 0; ia < landscape.na(); ++ia)
      for (int ib = 0; ib < landscape.na(); ++ib) {
        const Pose pose{landscape.x_of(ix), 0.0, config.body.H,
                        landscape.alpha_of(ia), landscape.beta_of(ib)};
        char contact = 0;
        for (const BeamParams& beam : config.beams) {
          if (ellipsoid_beam_clearance(pose, 0.0, beam, config.body, BeamShape::kBox)
                  .clearance < 1e-3) {
            contact = 1;
            break;
          }
        }
        contact_mask[landscape.index(ix, ia, ib)] = contact;
      }
  }

  const std::optional<SearchResult> found = astar(landscape, s, goal, &contact_mask);
  if (!found) throw std::runtime_error("plan: no finite-energy path to the goal");

  PlannedTrajectory traj;
  traj.nodes = found->path;
  traj.cost = found->cost;
  traj.points = time_parameterize(landscape, traj.nodes, config.v_x,
                                  config.planner.rotation_rate, t0);
  return traj;
}

}  // namespace beamsim
