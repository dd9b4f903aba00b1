#ifndef GRAMSHIELD_CATALOG_HPP
#define GRAMSHIELD_CATALOG_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gramshield/geo.hpp"

namespace gramshield {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quantized day: timestep t covers minute-of-day t * step_minutes.
struct TimeAxis {
  int step_minutes = 10;

  int num_steps() const { return 1440 / step_minutes; }
  int minute_of(int t) const { return t * step_minutes; }
  int step_of_minute(int minute) const { return minute / step_minutes; }
};

// Assumed travel speed. Constant by default; an optional per-hour table
// makes the reachability threshold time-varying. Converts implicitly from
// a plain km/h value.
struct SpeedProfile {
  double base_kmh = 4.0;
  std::optional<std::array<double, 24>> by_hour;

  SpeedProfile() = default;
  SpeedProfile(double kmh) : base_kmh(kmh) {}  // NOLINT: wanted implicit

  double at_minute(int minute_of_day) const {
    if (!by_hour) return base_kmh;
    const int m = ((minute_of_day % 1440) + 1440) % 1440;
    return (*by_hour)[m / 60];
  }
  double max_kmh() const {
    if (!by_hour) return base_kmh;
    double v = 0;
    for (double s : *by_hour) v = std::max(v, s);
    return v;
  }
};

// Opening interval in minutes-of-day, half-open [open, close).
// close < open wraps past midnight; close == 1440 means open to end of day.
struct OpenHours {
  int open = 0;
  int close = 1440;

  bool contains_minute(int minute) const {
    if (open < close) return minute >= open && minute < close;
    return minute >= open || minute < close;
  }
  // True if some minute of [a, b) (no wrap, b <= 1440) is open.
  bool overlaps(int a, int b) const;
};

struct CategoryNode {
  std::string name;
  int level = 1;   // 1 = root
  int parent = -1;
  std::optional<OpenHours> default_hours;  // template applied to POIs
};

// Rooted forest of category nodes, at most `depth()` levels deep.
class CategoryHierarchy {
 public:
  // CSV rows: node_id,level,parent_id[,open_min,close_min]
  static CategoryHierarchy load_csv(const std::string& path);

  int add_node(const std::string& name, int level, int parent,
               std::optional<OpenHours> hours = std::nullopt);

  int size() const { return static_cast<int>(nodes_.size()); }
  int depth() const { return depth_; }
  const CategoryNode& node(int id) const { return nodes_[id]; }
  int find(const std::string& name) const;  // -1 when absent

  int level(int id) const { return nodes_[id].level; }
  int parent(int id) const { return nodes_[id].parent; }

  // Deepest common ancestor of a and b (a node is its own ancestor);
  // -1 when the two lie under different roots.
  int common_ancestor(int a, int b) const;
  // Ancestor of `id` at `level`, or -1 if id is above that level.
  int ancestor_at_level(int id, int level) const;
  // Nearest template hours walking up from `id`.
  std::optional<OpenHours> template_hours(int id) const;

  std::vector<int> leaves() const;

 private:
  std::vector<CategoryNode> nodes_;
  std::unordered_map<std::string, int> by_name_;
  int depth_ = 3;
};

struct Poi {
  std::string name;
  double lat = 0, lon = 0;
  std::vector<int> category_path;  // node ids, root first
  OpenHours hours;
  double popularity = 0;

  int leaf_category() const { return category_path.back(); }
};

// Immutable POI universe with its public attributes. Safe for concurrent
// reads once loaded.
class PoiCatalog {
 public:
  static PoiCatalog load(const std::string& poi_csv,
                         const std::string& hierarchy_csv);
  static PoiCatalog from_parts(CategoryHierarchy hierarchy,
                               std::vector<Poi> pois);

  int size() const { return static_cast<int>(pois_.size()); }
  const Poi& poi(int id) const { return pois_[id]; }
  int find(const std::string& name) const;  // -1 when absent
  const CategoryHierarchy& hierarchy() const { return hierarchy_; }
  const BoundingBox& bbox() const { return bbox_; }

  double distance_km(int a, int b) const;
  bool reachable(int a, int b, double speed_kmh, double gap_min) const;

  // Replaces Haversine with a caller-supplied (possibly asymmetric)
  // row-major size*size distance table, e.g. road-network travel
  // distances. Install before the catalog is shared across workers.
  void set_distance_override(std::vector<double> matrix_km);
  bool has_distance_override() const { return !override_km_.empty(); }

  bool open_at(int id, int t, const TimeAxis& axis) const {
    return pois_[id].hours.contains_minute(axis.minute_of(t));
  }

  // Equal-degree split of the bounding box into side x side cells.
  // Points exactly on an interior boundary go to the lower-index cell.
  int grid_cell(double lat, double lon, int side) const;
  int grid_cell_of(int id, int side) const {
    return grid_cell(pois_[id].lat, pois_[id].lon, side);
  }
  // POIs whose coordinates fall inside `box`.
  std::vector<int> pois_in_box(const BoundingBox& box) const;

 private:
  CategoryHierarchy hierarchy_;
  std::vector<Poi> pois_;
  std::unordered_map<std::string, int> by_name_;
  BoundingBox bbox_;
  std::vector<double> override_km_;
  // fixed-resolution bucket index for box queries
  static constexpr int kIndexSide = 32;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace gramshield

#endif
