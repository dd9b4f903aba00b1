#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gramshield/datagen.hpp"
#include "gramshield/metrics.hpp"
#include "testutil.hpp"

using namespace gramshield;

TEST_CASE("campus catalog has the expected shape") {
  const PoiCatalog cat = make_campus_catalog();
  CHECK(cat.size() == 262);
  CHECK(cat.hierarchy().leaves().size() == 9);
  // bounding box around 2 km on a side
  CHECK(cat.bbox().diagonal_km() > 1.5);
  CHECK(cat.bbox().diagonal_km() < 4.5);
  // every POI has a full 3-level path
  for (int p = 0; p < cat.size(); ++p)
    CHECK(cat.poi(p).category_path.size() == 3);
}

TEST_CASE("count zero gives an empty set") {
  const PoiCatalog cat = make_campus_catalog();
  DatagenConfig cfg;
  cfg.count = 0;
  RngStream rng(201);
  CHECK(generate_campus(cat, TimeAxis{10}, 4, cfg, rng).empty());
}

TEST_CASE("generated trajectories pass the feasibility filter unchanged") {
  const PoiCatalog cat = make_campus_catalog();
  DatagenConfig cfg;
  cfg.count = 200;
  RngStream rng(202);
  const TimeAxis axis{10};
  const TrajectorySet set = generate_campus(cat, axis, 4, cfg, rng);
  REQUIRE(set.size() == 200);
  const FilterOutcome out = filter_trajectories(set, cat, axis, 4);
  CHECK(out.kept.size() == set.size());
  CHECK(out.dropped.empty());
  for (const Trajectory& t : set) {
    CHECK(t.length() >= cfg.len_min);
    CHECK(t.length() <= cfg.len_max);
  }
}

TEST_CASE("generation is deterministic in seed and config") {
  const PoiCatalog cat = make_campus_catalog();
  DatagenConfig cfg;
  cfg.count = 50;
  const TimeAxis axis{10};
  RngStream rng1(7), rng2(7), rng3(8);
  const TrajectorySet a = generate_campus(cat, axis, 4, cfg, rng1);
  const TrajectorySet b = generate_campus(cat, axis, 4, cfg, rng2);
  const TrajectorySet c = generate_campus(cat, axis, 4, cfg, rng3);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("filter categorizes drop reasons") {
  const PoiCatalog cat = testutil::line_catalog(3, 10.0, 540, 1020);
  const TimeAxis axis{10};
  TrajectorySet set;
  Trajectory closed;
  closed.user = "closed";
  closed.points = {{0, 10}};  // 1:40 am, outside 9-5
  Trajectory unreachable;
  unreachable.user = "unreachable";
  unreachable.points = {{0, 60}, {1, 61}};  // 10 km in 10 min
  Trajectory backwards;
  backwards.user = "backwards";
  backwards.points = {{0, 70}, {0, 60}};
  Trajectory fine;
  fine.user = "fine";
  fine.points = {{0, 60}, {0, 66}};
  set = {closed, unreachable, backwards, fine};
  const FilterOutcome out = filter_trajectories(set, cat, axis, 8);
  CHECK(out.kept.size() == 1);
  CHECK(out.kept[0].user == "fine");
  CHECK(out.drop_count(InfeasibleReason::Closed) == 1);
  CHECK(out.drop_count(InfeasibleReason::Unreachable) == 1);
  CHECK(out.drop_count(InfeasibleReason::NonMonotone) == 1);
}

TEST_CASE("event injection pins the demanded number of visits") {
  const PoiCatalog cat = make_campus_catalog();
  const int res_poi = cat.find("RES_001");
  REQUIRE(res_poi >= 0);
  DatagenConfig cfg;
  cfg.count = 700;
  cfg.events.push_back(CampusEvent{false, "RES_001", 1200, 1320, 500});
  RngStream rng(203);
  const TimeAxis axis{10};
  const TrajectorySet set = generate_campus(cat, axis, 4, cfg, rng);
  int visits = 0;
  for (const Trajectory& t : set)
    for (const TrajPoint& p : t.points)
      if (p.poi == res_poi && p.t >= 120 && p.t < 132) {
        ++visits;
        break;
      }
  CHECK(visits >= 500);
}

TEST_CASE("injected events are recoverable as hotspots") {
  const PoiCatalog cat = make_campus_catalog();
  DatagenConfig cfg;
  cfg.count = 800;
  cfg.events.push_back(CampusEvent{false, "RES_001", 1200, 1320, 500});
  cfg.events.push_back(CampusEvent{true, "academic", 540, 660, 200});
  RngStream rng(204);
  const TimeAxis axis{10};
  const TrajectorySet set = generate_campus(cat, axis, 4, cfg, rng);

  const auto poi_hs =
      detect_hotspots(set, HotspotGranularity::Poi, 20, cat, axis);
  const int res_poi = cat.find("RES_001");
  bool found = false;
  for (const Hotspot& h : poi_hs) {
    if (h.entity != res_poi) continue;
    if (h.t_start >= 120 && h.t_end < 132) {
      found = true;
      CHECK(std::abs(h.peak_count - 500) <= 25);  // within 5%
    }
  }
  CHECK(found);

  const auto cat_hs =
      detect_hotspots(set, HotspotGranularity::Cat1, 50, cat, axis);
  const int academic = cat.hierarchy().find("academic");
  bool cat_found = false;
  for (const Hotspot& h : cat_hs)
    if (h.entity == academic && h.t_start >= 54 && h.t_end < 66)
      cat_found = true;
  CHECK(cat_found);
}

TEST_CASE("events larger than the set are rejected") {
  const PoiCatalog cat = make_campus_catalog();
  DatagenConfig cfg;
  cfg.count = 10;
  cfg.events.push_back(CampusEvent{false, "RES_001", 1200, 1320, 50});
  RngStream rng(205);
  CHECK_THROWS_AS(generate_campus(cat, TimeAxis{10}, 4, cfg, rng),
                  std::invalid_argument);
}

TEST_CASE("catalog CSV round-trips through the loader") {
  namespace fs = std::filesystem;
  const PoiCatalog cat = make_campus_catalog(40);
  const auto dir = fs::temp_directory_path() / "gs_datagen_csv";
  fs::create_directories(dir);
  const std::string pois = (dir / "pois.csv").string();
  const std::string hier = (dir / "hier.csv").string();
  write_catalog_csv(cat, pois, hier);
  const PoiCatalog back = PoiCatalog::load(pois, hier);
  REQUIRE(back.size() == cat.size());
  for (int p = 0; p < cat.size(); ++p) {
    CHECK(back.poi(p).name == cat.poi(p).name);
    CHECK(back.poi(p).lat == doctest::Approx(cat.poi(p).lat).epsilon(1e-9));
    CHECK(back.poi(p).hours.open == cat.poi(p).hours.open);
    CHECK(back.poi(p).leaf_category() == cat.poi(p).leaf_category());
  }
  fs::remove_all(dir);
}
