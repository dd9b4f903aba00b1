#include "gramshield/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "gramshield/csv.hpp"

namespace gramshield {
namespace {

int parse_int(const std::string& s, const char* what, int line) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw LoadError("line " + std::to_string(line) + ": bad " +
                    std::string(what) + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const char* what, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw LoadError("line " + std::to_string(line) + ": bad " +
                    std::string(what) + " '" + s + "'");
  }
}

}  // namespace

bool OpenHours::overlaps(int a, int b) const {
  if (open < close) return a < close && b > open;
  // wrapped interval [open,1440) U [0,close)
  return b > open || a < close;
}

CategoryHierarchy CategoryHierarchy::load_csv(const std::string& path) {
  CategoryHierarchy h;
  bool header_seen = false;
  for_each_csv_row(path, [&](const std::vector<std::string>& f, int line) {
    if (!header_seen && !f.empty() && f[0] == "node_id") {
      header_seen = true;
      return;
    }
    if (f.size() < 3)
      throw LoadError("line " + std::to_string(line) +
                      ": hierarchy row needs node_id,level,parent_id");
    const std::string& name = f[0];
    int level = parse_int(f[1], "level", line);
    int parent = -1;
    if (!f[2].empty()) {
      parent = h.find(f[2]);
      if (parent < 0)
        throw LoadError("line " + std::to_string(line) +
                        ": unknown parent category '" + f[2] + "'");
    }
    std::optional<OpenHours> hours;
    if (f.size() >= 5 && !f[3].empty() && !f[4].empty()) {
      hours = OpenHours{parse_int(f[3], "open_min", line),
                        parse_int(f[4], "close_min", line)};
    }
    if (h.find(name) >= 0)
      throw LoadError("line " + std::to_string(line) +
                      ": duplicate category '" + name + "'");
    if (level < 1 || level > h.depth())
      throw LoadError("line " + std::to_string(line) + ": level " +
                      std::to_string(level) + " outside 1.." +
                      std::to_string(h.depth()));
    if ((level == 1) != (parent < 0))
      throw LoadError("line " + std::to_string(line) +
                      ": level-1 nodes have no parent, deeper nodes need one");
    if (parent >= 0 && h.level(parent) != level - 1)
      throw LoadError("line " + std::to_string(line) +
                      ": parent of a level-" + std::to_string(level) +
                      " node must be level " + std::to_string(level - 1));
    h.add_node(name, level, parent, hours);
  });
  return h;
}

int CategoryHierarchy::add_node(const std::string& name, int level, int parent,
                                std::optional<OpenHours> hours) {
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(CategoryNode{name, level, parent, hours});
  by_name_[name] = id;
  return id;
}

int CategoryHierarchy::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

int CategoryHierarchy::common_ancestor(int a, int b) const {
  while (a != b && a >= 0 && b >= 0) {
    if (level(a) > level(b))
      a = parent(a);
    else if (level(b) > level(a))
      b = parent(b);
    else {
      a = parent(a);
      b = parent(b);
    }
  }
  return (a == b) ? a : -1;
}

int CategoryHierarchy::ancestor_at_level(int id, int target) const {
  while (id >= 0 && level(id) > target) id = parent(id);
  return (id >= 0 && level(id) == target) ? id : -1;
}

std::optional<OpenHours> CategoryHierarchy::template_hours(int id) const {
  while (id >= 0) {
    if (nodes_[id].default_hours) return nodes_[id].default_hours;
    id = parent(id);
  }
  return std::nullopt;
}

std::vector<int> CategoryHierarchy::leaves() const {
  std::vector<bool> has_child(nodes_.size(), false);
  for (const auto& n : nodes_)
    if (n.parent >= 0) has_child[n.parent] = true;
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (!has_child[i]) out.push_back(i);
  return out;
}

PoiCatalog PoiCatalog::load(const std::string& poi_csv,
                            const std::string& hierarchy_csv) {
  CategoryHierarchy hierarchy = CategoryHierarchy::load_csv(hierarchy_csv);
  std::vector<Poi> pois;
  bool header_seen = false;
  for_each_csv_row(poi_csv, [&](const std::vector<std::string>& f, int line) {
    if (!header_seen && !f.empty() && f[0] == "id") {
      header_seen = true;
      return;
    }
    if (f.size() != 9)
      throw LoadError("line " + std::to_string(line) +
                      ": POI row needs 9 fields "
                      "(id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,"
                      "popularity), got " +
                      std::to_string(f.size()));
    Poi p;
    p.name = f[0];
    if (p.name.empty())
      throw LoadError("line " + std::to_string(line) + ": empty POI id");
    p.lat = parse_double(f[1], "lat", line);
    p.lon = parse_double(f[2], "lon", line);
    if (p.lat < -90 || p.lat > 90)
      throw LoadError("line " + std::to_string(line) + ": lat " + f[1] +
                      " outside [-90, 90]");
    if (p.lon < -180 || p.lon > 180)
      throw LoadError("line " + std::to_string(line) + ": lon " + f[2] +
                      " outside [-180, 180]");
    for (int c = 3; c <= 5; ++c) {
      if (f[c].empty()) break;
      int node = hierarchy.find(f[c]);
      if (node < 0)
        throw LoadError("line " + std::to_string(line) +
                        ": category '" + f[c] + "' not in hierarchy");
      if (hierarchy.level(node) != c - 2)
        throw LoadError("line " + std::to_string(line) + ": category '" +
                        f[c] + "' is level " +
                        std::to_string(hierarchy.level(node)) +
                        ", expected level " + std::to_string(c - 2));
      if (!p.category_path.empty() &&
          hierarchy.parent(node) != p.category_path.back())
        throw LoadError("line " + std::to_string(line) + ": category '" +
                        f[c] + "' is not a child of '" + f[c - 1] + "'");
      p.category_path.push_back(node);
    }
    if (p.category_path.empty())
      throw LoadError("line " + std::to_string(line) + ": POI '" + p.name +
                      "' has no category");
    if (!f[6].empty() && !f[7].empty()) {
      p.hours = OpenHours{parse_int(f[6], "open_min", line),
                          parse_int(f[7], "close_min", line)};
    } else {
      auto tmpl = hierarchy.template_hours(p.leaf_category());
      if (!tmpl)
        throw LoadError("line " + std::to_string(line) + ": POI '" + p.name +
                        "' has no opening hours and its category has no "
                        "template hours");
      p.hours = *tmpl;
    }
    if (p.hours.open < 0 || p.hours.open >= 1440 || p.hours.close < 0 ||
        p.hours.close > 1440)
      throw LoadError("line " + std::to_string(line) +
                      ": opening minutes outside the day");
    if (p.hours.open == p.hours.close ||
        (p.hours.open == 0 && p.hours.close == 0))
      throw LoadError("line " + std::to_string(line) + ": POI '" + p.name +
                      "' is open for zero minutes");
    p.popularity = f[8].empty() ? 0.0 : parse_double(f[8], "popularity", line);
    if (p.popularity < 0)
      throw LoadError("line " + std::to_string(line) +
                      ": negative popularity");
    pois.push_back(std::move(p));
  });
  return from_parts(std::move(hierarchy), std::move(pois));
}

PoiCatalog PoiCatalog::from_parts(CategoryHierarchy hierarchy,
                                  std::vector<Poi> pois) {
  PoiCatalog cat;
  cat.hierarchy_ = std::move(hierarchy);
  cat.pois_ = std::move(pois);
  for (int i = 0; i < cat.size(); ++i) {
    const Poi& p = cat.pois_[i];
    if (!cat.by_name_.emplace(p.name, i).second)
      throw LoadError("duplicate POI id '" + p.name + "'");
    cat.bbox_.extend(p.lat, p.lon);
  }
  cat.buckets_.assign(kIndexSide * kIndexSide, {});
  for (int i = 0; i < cat.size(); ++i)
    cat.buckets_[cat.grid_cell(cat.pois_[i].lat, cat.pois_[i].lon, kIndexSide)]
        .push_back(i);
  return cat;
}

void PoiCatalog::set_distance_override(std::vector<double> matrix_km) {
  if (matrix_km.size() != static_cast<size_t>(size()) * size())
    throw std::invalid_argument(
        "distance override must be a size*size matrix");
  override_km_ = std::move(matrix_km);
}

int PoiCatalog::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

double PoiCatalog::distance_km(int a, int b) const {
  if (!override_km_.empty())
    return override_km_[static_cast<size_t>(a) * size() + b];
  return haversine_km(pois_[a].lat, pois_[a].lon, pois_[b].lat, pois_[b].lon);
}

bool PoiCatalog::reachable(int a, int b, double speed_kmh,
                           double gap_min) const {
  return within_threshold(distance_km(a, b), speed_kmh, gap_min);
}

int PoiCatalog::grid_cell(double lat, double lon, int side) const {
  auto axis_index = [side](double v, double lo, double hi) {
    if (hi <= lo) return 0;
    const double w = (hi - lo) / side;
    int idx = static_cast<int>(std::floor((v - lo) / w));
    if (idx > 0 && v == lo + idx * w) --idx;  // boundary ties to lower cell
    return std::clamp(idx, 0, side - 1);
  };
  const int x = axis_index(lon, bbox_.min_lon, bbox_.max_lon);
  const int y = axis_index(lat, bbox_.min_lat, bbox_.max_lat);
  return y * side + x;
}

std::vector<int> PoiCatalog::pois_in_box(const BoundingBox& box) const {
  std::vector<int> out;
  if (size() == 0 || box.empty) return out;
  // restrict the scan to buckets overlapping the query box
  const int x0 = grid_cell(pois_[0].lat, box.min_lon, kIndexSide) % kIndexSide;
  const int x1 = grid_cell(pois_[0].lat, box.max_lon, kIndexSide) % kIndexSide;
  const int y0 = grid_cell(box.min_lat, pois_[0].lon, kIndexSide) / kIndexSide;
  const int y1 = grid_cell(box.max_lat, pois_[0].lon, kIndexSide) / kIndexSide;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      for (int i : buckets_[y * kIndexSide + x])
        if (box.contains(pois_[i].lat, pois_[i].lon)) out.push_back(i);
    }
  }
  return out;
}

}  // namespace gramshield
