#include "gramshield/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace gramshield {

const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Space: return "space";
    case Dimension::Time: return "time";
    case Dimension::Category: return "category";
    case Dimension::Combined: return "combined";
  }
  return "?";
}

double point_distance(const TrajPoint& real, const TrajPoint& pert,
                      Dimension dim, const PoiCatalog& catalog,
                      const TimeAxis& axis, const DistanceParams& params) {
  switch (dim) {
    case Dimension::Space:
      return catalog.distance_km(real.poi, pert.poi);
    case Dimension::Time:
      return time_distance_hours(axis.minute_of(real.t), axis.minute_of(pert.t),
                                 params);
    case Dimension::Category:
      return category_distance(catalog.hierarchy(),
                               catalog.poi(real.poi).leaf_category(),
                               catalog.poi(pert.poi).leaf_category(), params);
    case Dimension::Combined: {
      const double ds = point_distance(real, pert, Dimension::Space, catalog,
                                       axis, params);
      const double dt = point_distance(real, pert, Dimension::Time, catalog,
                                       axis, params);
      const double dc = point_distance(real, pert, Dimension::Category,
                                       catalog, axis, params);
      return std::sqrt(ds * ds + dt * dt + dc * dc);
    }
  }
  return 0;
}

std::vector<double> normalized_error_samples(const TrajectorySet& real,
                                             const TrajectorySet& pert,
                                             Dimension dim,
                                             const PoiCatalog& catalog,
                                             const TimeAxis& axis,
                                             const DistanceParams& params) {
  if (real.size() != pert.size())
    throw std::invalid_argument("trajectory sets differ in size");
  std::vector<double> out;
  out.reserve(real.size());
  for (size_t k = 0; k < real.size(); ++k) {
    const auto& a = real[k].points;
    const auto& b = pert[k].points;
    if (a.size() != b.size())
      throw std::invalid_argument("pair '" + real[k].user +
                                  "' has mismatched lengths");
    double sum = 0;
    for (size_t i = 0; i < a.size(); ++i)
      sum += point_distance(a[i], b[i], dim, catalog, axis, params);
    out.push_back(a.empty() ? 0.0 : sum / a.size());
  }
  return out;
}

double normalized_error(const TrajectorySet& real, const TrajectorySet& pert,
                        Dimension dim, const PoiCatalog& catalog,
                        const TimeAxis& axis, const DistanceParams& params) {
  const std::vector<double> per_traj =
      normalized_error_samples(real, pert, dim, catalog, axis, params);
  if (per_traj.empty()) return 0;
  double sum = 0;
  for (double v : per_traj) sum += v;
  return sum / per_traj.size();
}

double prq(const TrajectorySet& real, const TrajectorySet& pert, Dimension dim,
           double delta, const PoiCatalog& catalog, const TimeAxis& axis,
           const DistanceParams& params) {
  if (real.size() != pert.size())
    throw std::invalid_argument("trajectory sets differ in size");
  if (real.empty()) return 0;
  double total = 0;
  for (size_t k = 0; k < real.size(); ++k) {
    const auto& a = real[k].points;
    const auto& b = pert[k].points;
    if (a.size() != b.size())
      throw std::invalid_argument("pair '" + real[k].user +
                                  "' has mismatched lengths");
    int hit = 0;
    for (size_t i = 0; i < a.size(); ++i)
      if (point_distance(a[i], b[i], dim, catalog, axis, params) <= delta)
        ++hit;
    total += a.empty() ? 0.0 : static_cast<double>(hit) / a.size();
  }
  return total / real.size() * 100.0;
}

const char* granularity_name(HotspotGranularity g) {
  switch (g) {
    case HotspotGranularity::Poi: return "poi";
    case HotspotGranularity::Grid4: return "grid4";
    case HotspotGranularity::Grid2: return "grid2";
    case HotspotGranularity::Cat1: return "cat1";
    case HotspotGranularity::Cat2: return "cat2";
    case HotspotGranularity::Cat3: return "cat3";
  }
  return "?";
}

int default_eta(HotspotGranularity g) {
  switch (g) {
    case HotspotGranularity::Poi: return 20;
    case HotspotGranularity::Grid4: return 20;
    case HotspotGranularity::Grid2: return 50;
    case HotspotGranularity::Cat1: return 50;
    case HotspotGranularity::Cat2: return 30;
    case HotspotGranularity::Cat3: return 20;
  }
  return 20;
}

namespace {

// Entity of a POI under a granularity; category levels fall back to the
// deepest node when a path is shorter than the requested level.
int entity_of(int poi, HotspotGranularity g, const PoiCatalog& catalog) {
  switch (g) {
    case HotspotGranularity::Poi: return poi;
    case HotspotGranularity::Grid4: return catalog.grid_cell_of(poi, 4);
    case HotspotGranularity::Grid2: return catalog.grid_cell_of(poi, 2);
    case HotspotGranularity::Cat1:
    case HotspotGranularity::Cat2:
    case HotspotGranularity::Cat3: {
      const int want = g == HotspotGranularity::Cat1   ? 1
                       : g == HotspotGranularity::Cat2 ? 2
                                                       : 3;
      const auto& path = catalog.poi(poi).category_path;
      const int idx = std::min<int>(want, static_cast<int>(path.size())) - 1;
      return path[idx];
    }
  }
  return -1;
}

double hotspot_distance_hours(const Hotspot& a, const Hotspot& b,
                              const TimeAxis& axis) {
  const double scale = axis.step_minutes / 60.0;
  return (std::abs(a.t_start - b.t_start) + std::abs(a.t_end - b.t_end)) *
         scale;
}

// Pair each perturbed hotspot with its nearest real hotspot of the same
// granularity; skip entities with no real hotspot at all. Ties go to the
// earliest real start, then earliest end, then smallest entity.
std::vector<std::pair<const Hotspot*, const Hotspot*>> pair_hotspots(
    const std::vector<Hotspot>& real, const std::vector<Hotspot>& pert,
    const TimeAxis& axis) {
  std::set<std::pair<int, int>> real_entities;
  for (const Hotspot& h : real)
    real_entities.insert({static_cast<int>(h.granularity), h.entity});

  std::vector<std::pair<const Hotspot*, const Hotspot*>> pairs;
  for (const Hotspot& hp : pert) {
    if (!real_entities.count({static_cast<int>(hp.granularity), hp.entity}))
      continue;
    const Hotspot* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Hotspot& hr : real) {
      if (hr.granularity != hp.granularity) continue;
      const double d = hotspot_distance_hours(hr, hp, axis);
      if (!best || d < best_d ||
          (d == best_d &&
           std::tie(hr.t_start, hr.t_end, hr.entity) <
               std::tie(best->t_start, best->t_end, best->entity))) {
        best = &hr;
        best_d = d;
      }
    }
    pairs.emplace_back(best, &hp);
  }
  return pairs;
}

}  // namespace

std::vector<Hotspot> detect_hotspots(const TrajectorySet& set,
                                     HotspotGranularity granularity, int eta,
                                     const PoiCatalog& catalog,
                                     const TimeAxis& axis) {
  const int T = axis.num_steps();
  // unique users per (entity, timestep); one trajectory is one user
  std::map<int, std::vector<std::set<std::string>>> visitors;
  for (const Trajectory& traj : set) {
    for (const TrajPoint& p : traj.points) {
      const int e = entity_of(p.poi, granularity, catalog);
      auto& grid = visitors[e];
      if (grid.empty()) grid.resize(T);
      grid[p.t].insert(traj.user);
    }
  }

  std::vector<Hotspot> out;
  for (const auto& [entity, grid] : visitors) {
    int start = -1, peak = 0;
    for (int t = 0; t <= T; ++t) {
      const int count = (t < T) ? static_cast<int>(grid[t].size()) : 0;
      if (count >= eta) {
        if (start < 0) {
          start = t;
          peak = 0;
        }
        peak = std::max(peak, count);
      } else if (start >= 0) {
        out.push_back(Hotspot{granularity, entity, start, t - 1, peak});
        start = -1;
      }
    }
  }
  return out;
}

std::optional<double> ahd(const std::vector<Hotspot>& real,
                          const std::vector<Hotspot>& pert,
                          const TimeAxis& axis) {
  const auto pairs = pair_hotspots(real, pert, axis);
  if (pairs.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& [hr, hp] : pairs)
    sum += hotspot_distance_hours(*hr, *hp, axis);
  return sum / pairs.size();
}

std::optional<double> acd(const std::vector<Hotspot>& real,
                          const std::vector<Hotspot>& pert,
                          const TimeAxis& axis) {
  const auto pairs = pair_hotspots(real, pert, axis);
  if (pairs.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& [hr, hp] : pairs)
    sum += std::abs(hr->peak_count - hp->peak_count);
  return sum / pairs.size();
}

}  // namespace gramshield
