#ifndef GRAMSHIELD_REGIONS_HPP
#define GRAMSHIELD_REGIONS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gramshield/catalog.hpp"

namespace gramshield {

// A space-time-category partition element: one or more grid cells, a
// contiguous (circularly) run of base time slots, one or more category
// nodes, and the member POIs assigned to it.
struct StcRegion {
  int id = -1;
  std::vector<int> space_cells;     // sorted fine-grid cell ids
  std::vector<int> time_slots;      // circular hull, listed in arc order
  std::vector<int> category_nodes;  // sorted hierarchy node ids
  std::vector<int> members;         // sorted POI ids, never empty
  double centroid_lat = 0, centroid_lon = 0;
  double time_centroid_min = 0;  // minutes-of-day, circular mean

  bool covers_slot(int slot) const;
};

enum class MergeDim { Space, Time, Category };

std::vector<MergeDim> parse_merge_order(const std::string& text);
std::string merge_order_to_string(const std::vector<MergeDim>& order);

class RegionSet {
 public:
  int grid_side = 4;
  int slot_minutes = 60;
  std::vector<StcRegion> regions;

  int num_slots() const { return 1440 / slot_minutes; }
  int size() const { return static_cast<int>(regions.size()); }
  const StcRegion& region(int id) const { return regions[id]; }

  // Post-merge region owning the (fine cell, base slot, leaf category)
  // combination; -1 when that combination had no open POI.
  int region_for(int cell, int slot, int leaf) const;

  void set_projection(std::unordered_map<std::uint64_t, int> proj,
                      int num_nodes);
  std::uint64_t projection_key(int cell, int slot, int leaf) const;
  const std::unordered_map<std::uint64_t, int>& projection() const {
    return projection_;
  }

 private:
  std::unordered_map<std::uint64_t, int> projection_;
  int num_nodes_ = 0;
};

// One region per (grid cell x time slot x leaf category) with at least one
// member POI open during part of the slot; empty combinations are absent.
RegionSet build_regions(const PoiCatalog& catalog, int grid_side,
                        int slot_minutes);

// Greedy pass per dimension in `order`: every region with fewer than
// `kappa` members is merged with its nearest eligible partner along that
// dimension (adjacent cell within a coarser 2x2 / 1x1 block; adjacent or
// touching hour window; category sharing a common ancestor). Nearness is
// the combined semantic distance; ties go to the smallest partner id.
RegionSet merge_regions(const RegionSet& in, const PoiCatalog& catalog,
                        int kappa, const std::vector<MergeDim>& order);

// True when at least one member pair satisfies POI reachability at the gap.
bool region_reachable(const PoiCatalog& catalog, const StcRegion& a,
                      const StcRegion& b, double speed_kmh, double gap_min);

// Circular hull helpers shared with the merge logic and tests.
std::vector<int> circular_hull(std::vector<int> slots, int num_slots);
double circular_mean_minute(const std::vector<int>& slots, int slot_minutes);

}  // namespace gramshield

#endif
