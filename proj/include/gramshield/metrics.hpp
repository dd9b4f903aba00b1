#ifndef GRAMSHIELD_METRICS_HPP
#define GRAMSHIELD_METRICS_HPP

#include <map>
#include <optional>

#include "gramshield/distance.hpp"
#include "gramshield/trajectory.hpp"

namespace gramshield {

enum class Dimension { Space, Time, Category, Combined };
const char* dimension_name(Dimension d);

// Per-point distance in one dimension between paired points.
double point_distance(const TrajPoint& real, const TrajPoint& pert,
                      Dimension dim, const PoiCatalog& catalog,
                      const TimeAxis& axis, const DistanceParams& params);

// Mean over trajectories of the per-trajectory mean point distance.
// Pairs are positional; lengths must match within each pair.
double normalized_error(const TrajectorySet& real, const TrajectorySet& pert,
                        Dimension dim, const PoiCatalog& catalog,
                        const TimeAxis& axis, const DistanceParams& params);

// Per-trajectory normalized errors (bootstrap input for trend checks).
std::vector<double> normalized_error_samples(const TrajectorySet& real,
                                             const TrajectorySet& pert,
                                             Dimension dim,
                                             const PoiCatalog& catalog,
                                             const TimeAxis& axis,
                                             const DistanceParams& params);

// Preservation range query: percentage of points whose perturbed value
// stays within delta of the true one, averaged per trajectory first.
double prq(const TrajectorySet& real, const TrajectorySet& pert, Dimension dim,
           double delta, const PoiCatalog& catalog, const TimeAxis& axis,
           const DistanceParams& params);

enum class HotspotGranularity { Poi, Grid4, Grid2, Cat1, Cat2, Cat3 };
const char* granularity_name(HotspotGranularity g);

struct Hotspot {
  HotspotGranularity granularity;
  int entity = -1;  // POI id, spatial cell id, or category node id
  int t_start = 0;  // timesteps, inclusive
  int t_end = 0;
  int peak_count = 0;

  bool operator==(const Hotspot&) const = default;
};

// Maximal timestep intervals during which an entity's unique-visitor count
// stays at or above eta; one trajectory counts as one user.
std::vector<Hotspot> detect_hotspots(const TrajectorySet& set,
                                     HotspotGranularity granularity, int eta,
                                     const PoiCatalog& catalog,
                                     const TimeAxis& axis);

// Average hotspot distance in hours: each perturbed hotspot (whose entity
// has at least one real hotspot) is scored against the nearest real
// hotspot of the same granularity. nullopt when nothing survives the
// entity filter.
std::optional<double> ahd(const std::vector<Hotspot>& real,
                          const std::vector<Hotspot>& pert,
                          const TimeAxis& axis);

// Average |peak - peak| over the same pairing as ahd (nearest real
// hotspot, ties to the earliest start).
std::optional<double> acd(const std::vector<Hotspot>& real,
                          const std::vector<Hotspot>& pert,
                          const TimeAxis& axis);

// Default thresholds from the hotspot evaluation protocol.
int default_eta(HotspotGranularity g);

}  // namespace gramshield

#endif
