#ifndef GRAMSHIELD_DATAGEN_HPP
#define GRAMSHIELD_DATAGEN_HPP

#include "gramshield/rng.hpp"
#include "gramshield/trajectory.hpp"

namespace gramshield {

// A popular gathering injected into the synthetic set: `size` trajectories
// get one point pinned to the entity (a POI name or a category name) at a
// timestep drawn once from [start_min, end_min).
struct CampusEvent {
  bool is_category = false;
  std::string entity;
  int start_min = 0;
  int end_min = 0;
  int size = 0;
};

struct DatagenConfig {
  int count = 1000;
  int len_min = 3;
  int len_max = 8;
  int start_min = 360;   // 6am
  int start_max = 1320;  // 10pm
  int max_gap_min = 120;
  std::vector<CampusEvent> events;
};

// Synthetic campus: ~2 km x 2 km of buildings over a three-level,
// nine-leaf category hierarchy with per-category opening hours.
PoiCatalog make_campus_catalog(int n_pois = 262, std::uint64_t seed = 7);

// Write a catalog back out in the loadable CSV formats.
void write_catalog_csv(const PoiCatalog& catalog, const std::string& poi_path,
                       const std::string& hierarchy_path);

// Random walks over open, reachable POIs: length ~ U{len_min..len_max},
// start ~ U[start_min, start_max], gaps ~ U{g_t..max_gap_min}. Event
// trajectories are generated outward from their pinned point. Everything
// emitted passes the feasibility validator. Deterministic in (seed, config).
TrajectorySet generate_campus(const PoiCatalog& catalog, const TimeAxis& axis,
                              const SpeedProfile& speed,
                              const DatagenConfig& config, RngStream& rng);

}  // namespace gramshield

#endif
