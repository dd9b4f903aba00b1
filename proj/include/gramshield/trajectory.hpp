#ifndef GRAMSHIELD_TRAJECTORY_HPP
#define GRAMSHIELD_TRAJECTORY_HPP

#include <optional>
#include <string>
#include <vector>

#include "gramshield/regions.hpp"

namespace gramshield {

struct TrajPoint {
  int poi = -1;  // catalog id
  int t = 0;     // timestep on the TimeAxis

  bool operator==(const TrajPoint&) const = default;
};

struct Trajectory {
  std::string user;
  std::vector<TrajPoint> points;

  int length() const { return static_cast<int>(points.size()); }
  bool operator==(const Trajectory&) const = default;
};

using TrajectorySet = std::vector<Trajectory>;

// The same trajectory projected to post-merge STC regions.
using RegionTrajectory = std::vector<int>;

// Why a trajectory fails the feasibility validator.
enum class InfeasibleReason { NonMonotone, Closed, Unreachable };
const char* infeasible_reason_name(InfeasibleReason r);

// Checks strict time monotonicity, opening hours at every point, and link
// reachability at each actual gap. nullopt means feasible.
std::optional<InfeasibleReason> validate_trajectory(
    const Trajectory& traj, const PoiCatalog& catalog, const TimeAxis& axis,
    const SpeedProfile& speed);

struct FilterOutcome {
  TrajectorySet kept;
  std::vector<std::pair<std::string, InfeasibleReason>> dropped;

  int drop_count(InfeasibleReason r) const;
};

FilterOutcome filter_trajectories(const TrajectorySet& set,
                                  const PoiCatalog& catalog,
                                  const TimeAxis& axis,
                                  const SpeedProfile& speed);

struct UnmappablePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maps every (poi, t) to the unique post-merge region holding that
// (cell, slot, leaf category). Throws UnmappablePoint when a POI is
// visited while closed (such trajectories should have been filtered).
RegionTrajectory project_trajectory(const Trajectory& traj,
                                    const RegionSet& regions,
                                    const PoiCatalog& catalog,
                                    const TimeAxis& axis);

// JSON Lines: {"user": "u1", "points": [{"poi": "P1", "t": 54}, ...]}
TrajectorySet read_trajectories_jsonl(const std::string& path,
                                      const PoiCatalog& catalog);
void write_trajectories_jsonl(const std::string& path,
                              const TrajectorySet& set,
                              const PoiCatalog& catalog);

}  // namespace gramshield

#endif
