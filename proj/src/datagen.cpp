#include "gramshield/datagen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gramshield {
namespace {

struct LeafSpec {
  const char* name;
  const char* parent;
  const char* prefix;
  int open, close;
  int share;  // out of the POI count
};

constexpr LeafSpec kLeaves[] = {
    {"lecture_hall", "teaching", "LEC", 480, 1080, 40},
    {"classroom", "teaching", "CLS", 480, 1080, 45},
    {"lab", "research", "LAB", 540, 1260, 35},
    {"library", "research", "LIB", 480, 1380, 12},
    {"dormitory", "housing", "RES", 0, 1440, 45},
    {"apartment", "housing", "APT", 0, 1440, 30},
    {"cafe", "food", "CAF", 420, 1140, 25},
    {"dining_hall", "food", "DIN", 420, 1260, 15},
    {"stadium", "recreation", "STA", 540, 1320, 15},
};
constexpr int kShareTotal = 262;

}  // namespace

PoiCatalog make_campus_catalog(int n_pois, std::uint64_t seed) {
  CategoryHierarchy h;
  const int academic = h.add_node("academic", 1, -1);
  const int residential = h.add_node("residential", 1, -1);
  const int amenity = h.add_node("amenity", 1, -1);
  const int teaching = h.add_node("teaching", 2, academic);
  const int research = h.add_node("research", 2, academic);
  const int housing = h.add_node("housing", 2, residential);
  const int food = h.add_node("food", 2, amenity);
  const int recreation = h.add_node("recreation", 2, amenity);
  std::vector<int> parent_of = {teaching, teaching, research, research,
                                housing,  housing,  food,     food,
                                recreation};
  std::vector<int> leaf_ids;
  for (size_t i = 0; i < std::size(kLeaves); ++i)
    leaf_ids.push_back(h.add_node(kLeaves[i].name, 3, parent_of[i],
                                  OpenHours{kLeaves[i].open,
                                            kLeaves[i].close}));

  RngStream rng(seed);
  std::vector<Poi> pois;
  char name[32];
  for (size_t li = 0; li < std::size(kLeaves); ++li) {
    const LeafSpec& spec = kLeaves[li];
    const int quota = std::max(1, spec.share * n_pois / kShareTotal);
    for (int k = 0; k < quota && static_cast<int>(pois.size()) < n_pois; ++k) {
      Poi p;
      std::snprintf(name, sizeof(name), "%s_%03d", spec.prefix, k + 1);
      p.name = name;
      p.lat = 49.2555 + rng.next_double() * 0.0190;   // ~2.1 km tall
      p.lon = -123.2620 + rng.next_double() * 0.0290;  // ~2.1 km wide
      p.category_path = {h.parent(h.parent(leaf_ids[li])),
                         h.parent(leaf_ids[li]), leaf_ids[li]};
      p.hours = OpenHours{spec.open, spec.close};
      p.popularity = 1.0 + static_cast<double>(rng.next_below(100));
      pois.push_back(std::move(p));
    }
  }
  // top up with classrooms if integer division left a shortfall
  int k = 1000;
  while (static_cast<int>(pois.size()) < n_pois) {
    Poi p;
    std::snprintf(name, sizeof(name), "CLS_%03d", k++);
    p.name = name;
    p.lat = 49.2555 + rng.next_double() * 0.0190;
    p.lon = -123.2620 + rng.next_double() * 0.0290;
    p.category_path = {academic, teaching, leaf_ids[1]};
    p.hours = OpenHours{480, 1080};
    p.popularity = 1.0 + static_cast<double>(rng.next_below(100));
    pois.push_back(std::move(p));
  }
  return PoiCatalog::from_parts(std::move(h), std::move(pois));
}

void write_catalog_csv(const PoiCatalog& catalog, const std::string& poi_path,
                       const std::string& hierarchy_path) {
  std::ofstream hout(hierarchy_path, std::ios::binary);
  if (!hout) throw LoadError("cannot write " + hierarchy_path);
  hout << "node_id,level,parent_id,open_min,close_min\n";
  const CategoryHierarchy& h = catalog.hierarchy();
  for (int i = 0; i < h.size(); ++i) {
    const CategoryNode& n = h.node(i);
    hout << n.name << ',' << n.level << ','
         << (n.parent >= 0 ? h.node(n.parent).name : "") << ',';
    if (n.default_hours)
      hout << n.default_hours->open << ',' << n.default_hours->close;
    else
      hout << ',';
    hout << '\n';
  }

  std::ofstream pout(poi_path, std::ios::binary);
  if (!pout) throw LoadError("cannot write " + poi_path);
  pout << "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n";
  char line[256];
  for (int i = 0; i < catalog.size(); ++i) {
    const Poi& p = catalog.poi(i);
    std::string cats[3];
    for (size_t c = 0; c < p.category_path.size() && c < 3; ++c)
      cats[c] = h.node(p.category_path[c]).name;
    std::snprintf(line, sizeof(line), "%s,%.7f,%.7f,%s,%s,%s,%d,%d,%g",
                  p.name.c_str(), p.lat, p.lon, cats[0].c_str(),
                  cats[1].c_str(), cats[2].c_str(), p.hours.open,
                  p.hours.close, p.popularity);
    pout << line << '\n';
  }
}

namespace {

struct EventPin {
  int traj_index_begin = 0;
  int traj_index_end = 0;  // exclusive
  std::vector<int> poi_choices;
  int timestep = 0;
};

// POIs eligible for an event: the named POI, or all members of the named
// category, filtered to those open at the pinned timestep.
std::vector<int> event_pois(const CampusEvent& ev, const PoiCatalog& catalog,
                            const TimeAxis& axis, int timestep) {
  std::vector<int> out;
  if (ev.is_category) {
    const int node = catalog.hierarchy().find(ev.entity);
    if (node < 0)
      throw std::invalid_argument("event category '" + ev.entity +
                                  "' not in hierarchy");
    const int lvl = catalog.hierarchy().level(node);
    for (int p = 0; p < catalog.size(); ++p) {
      const auto& path = catalog.poi(p).category_path;
      if (static_cast<int>(path.size()) >= lvl && path[lvl - 1] == node &&
          catalog.open_at(p, timestep, axis))
        out.push_back(p);
    }
  } else {
    const int p = catalog.find(ev.entity);
    if (p < 0)
      throw std::invalid_argument("event POI '" + ev.entity + "' not found");
    if (catalog.open_at(p, timestep, axis)) out.push_back(p);
  }
  if (out.empty())
    throw std::invalid_argument("event '" + ev.entity +
                                "' has no open POI at its pinned time");
  return out;
}

class CampusSampler {
 public:
  CampusSampler(const PoiCatalog& catalog, const TimeAxis& axis,
                const SpeedProfile& speed, const DatagenConfig& cfg)
      : catalog_(catalog), axis_(axis), speed_(speed), cfg_(cfg),
        leaves_(catalog.hierarchy().leaves()) {}

  // One feasible trajectory; pin < 0 means unpinned.
  std::vector<TrajPoint> sample(RngStream& rng, int pinned_poi,
                                int pinned_step) const {
    for (int attempt = 0; attempt < 500; ++attempt) {
      auto pts = try_sample(rng, pinned_poi, pinned_step);
      if (!pts.empty()) return pts;
    }
    throw std::runtime_error(
        "campus generation failed repeatedly; the catalog is too sparse for "
        "the configured gaps");
  }

 private:
  int max_gap_steps() const {
    return std::max(1, cfg_.max_gap_min / axis_.step_minutes);
  }

  int draw_gap_steps(RngStream& rng) const {
    return 1 + static_cast<int>(rng.next_below(max_gap_steps()));
  }

  // POIs open at t whose link to `to` (departing at t) is feasible.
  std::vector<int> backward_candidates(int to, int t, int gap_steps) const {
    std::vector<int> out;
    const double gap_min = static_cast<double>(gap_steps) * axis_.step_minutes;
    const double kmh = speed_.at_minute(axis_.minute_of(t));
    for (int p = 0; p < catalog_.size(); ++p)
      if (catalog_.open_at(p, t, axis_) &&
          catalog_.reachable(p, to, kmh, gap_min))
        out.push_back(p);
    return out;
  }

  // POIs open at t and reachable from `from` departing at t - gap_steps.
  std::vector<int> candidates(int from, int t, int gap_steps) const {
    std::vector<int> out;
    const double gap_min = static_cast<double>(gap_steps) * axis_.step_minutes;
    const double kmh = speed_.at_minute(axis_.minute_of(t - gap_steps));
    for (int p = 0; p < catalog_.size(); ++p)
      if (catalog_.open_at(p, t, axis_) &&
          catalog_.reachable(from, p, kmh, gap_min))
        out.push_back(p);
    return out;
  }

  std::vector<TrajPoint> try_sample(RngStream& rng, int pinned_poi,
                                    int pinned_step) const {
    const int len =
        cfg_.len_min +
        static_cast<int>(rng.next_below(cfg_.len_max - cfg_.len_min + 1));
    std::vector<TrajPoint> pts(len);
    int anchor = 0;
    if (pinned_poi >= 0) {
      anchor = static_cast<int>(rng.next_below(len));
      pts[anchor] = TrajPoint{pinned_poi, pinned_step};
    } else {
      const int start_steps =
          (cfg_.start_max - cfg_.start_min) / axis_.step_minutes + 1;
      const int t0 = cfg_.start_min / axis_.step_minutes +
                     static_cast<int>(rng.next_below(start_steps));
      const int leaf = leaves_[rng.next_below(leaves_.size())];
      std::vector<int> open;
      for (int p = 0; p < catalog_.size(); ++p)
        if (catalog_.poi(p).leaf_category() == leaf &&
            catalog_.open_at(p, t0, axis_))
          open.push_back(p);
      if (open.empty()) return {};
      pts[0] = TrajPoint{static_cast<int>(open[rng.next_below(open.size())]),
                         t0};
    }
    // forward from the anchor
    for (int i = anchor + 1; i < len; ++i) {
      bool placed = false;
      for (int retry = 0; retry < 8 && !placed; ++retry) {
        const int gap = draw_gap_steps(rng);
        const int t = pts[i - 1].t + gap;
        if (t >= axis_.num_steps()) continue;
        const auto cands = candidates(pts[i - 1].poi, t, gap);
        if (cands.empty()) continue;
        pts[i] = TrajPoint{cands[rng.next_below(cands.size())], t};
        placed = true;
      }
      if (!placed) return {};
    }
    // backward from the anchor (event trajectories only); the new point
    // departs at t, so reachability is checked at that minute
    for (int i = anchor - 1; i >= 0; --i) {
      bool placed = false;
      for (int retry = 0; retry < 8 && !placed; ++retry) {
        const int gap = draw_gap_steps(rng);
        const int t = pts[i + 1].t - gap;
        if (t < 0) continue;
        const auto cands = backward_candidates(pts[i + 1].poi, t, gap);
        if (cands.empty()) continue;
        pts[i] = TrajPoint{cands[rng.next_below(cands.size())], t};
        placed = true;
      }
      if (!placed) return {};
    }
    return pts;
  }

  const PoiCatalog& catalog_;
  const TimeAxis& axis_;
  SpeedProfile speed_;
  const DatagenConfig& cfg_;
  std::vector<int> leaves_;
};

}  // namespace

TrajectorySet generate_campus(const PoiCatalog& catalog, const TimeAxis& axis,
                              const SpeedProfile& speed,
                              const DatagenConfig& config, RngStream& rng) {
  int event_total = 0;
  for (const CampusEvent& ev : config.events) event_total += ev.size;
  if (event_total > config.count)
    throw std::invalid_argument(
        "events demand " + std::to_string(event_total) +
        " trajectories but only " + std::to_string(config.count) +
        " are being generated");

  // pin each event once; all of its trajectories share the moment
  std::vector<EventPin> pins;
  int cursor = 0;
  for (const CampusEvent& ev : config.events) {
    EventPin pin;
    const int lo = ev.start_min / axis.step_minutes;
    const int hi = ev.end_min / axis.step_minutes;
    if (hi <= lo)
      throw std::invalid_argument("event '" + ev.entity +
                                  "' has an empty time window");
    pin.timestep = lo + static_cast<int>(rng.next_below(hi - lo));
    pin.poi_choices = event_pois(ev, catalog, axis, pin.timestep);
    pin.traj_index_begin = cursor;
    pin.traj_index_end = cursor + ev.size;
    cursor += ev.size;
    pins.push_back(std::move(pin));
  }

  CampusSampler sampler(catalog, axis, speed, config);
  TrajectorySet set;
  set.reserve(config.count);
  for (int i = 0; i < config.count; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    int pinned_poi = -1, pinned_step = 0;
    for (const EventPin& pin : pins) {
      if (i >= pin.traj_index_begin && i < pin.traj_index_end) {
        pinned_poi = static_cast<int>(
            pin.poi_choices[sub.next_below(pin.poi_choices.size())]);
        pinned_step = pin.timestep;
        break;
      }
    }
    Trajectory traj;
    traj.user = "u" + std::to_string(i);
    traj.points = sampler.sample(sub, pinned_poi, pinned_step);
    set.push_back(std::move(traj));
  }
  return set;
}

}  // namespace gramshield
