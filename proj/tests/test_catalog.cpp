#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include "testutil.hpp"

using namespace gramshield;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gs_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) {
    const fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  static int counter;
};
int TempDir::counter = 0;

const char* kHierarchyCsv =
    "node_id,level,parent_id,open_min,close_min\n"
    "shopping,1,,540,1020\n"
    "apparel,2,shopping,,\n"
    "shoe_shop,3,apparel,,\n"
    "nightlife,1,,1200,120\n"
    "bars,2,nightlife,,\n"
    "bar,3,bars,,\n";

}  // namespace

TEST_CASE("load_catalog accepts a small valid file") {
  TempDir dir;
  const std::string hier = dir.file("h.csv", kHierarchyCsv);
  const std::string pois = dir.file(
      "p.csv",
      "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n"
      "# comment line\n"
      "A,48.0,11.0,shopping,apparel,shoe_shop,540,1020,3\n"
      "B,48.0,11.01,shopping,apparel,shoe_shop,,,1\n"
      "C,48.0,11.02,nightlife,bars,bar,1320,120,2\n");
  const PoiCatalog cat = PoiCatalog::load(pois, hier);
  CHECK(cat.size() == 3);
  CHECK(cat.find("B") == 1);
  // B had no explicit hours: falls back to the shopping template
  CHECK(cat.poi(1).hours.open == 540);
  CHECK(cat.poi(1).hours.close == 1020);
  CHECK(cat.poi(2).hours.open == 1320);
}

TEST_CASE("load_catalog rejects bad rows with the line number") {
  TempDir dir;
  const std::string hier = dir.file("h.csv", kHierarchyCsv);

  SUBCASE("latitude out of range") {
    const std::string pois = dir.file(
        "p.csv",
        "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n"
        "A,95.0,11.0,shopping,apparel,shoe_shop,540,1020,1\n");
    CHECK_THROWS_WITH_AS(PoiCatalog::load(pois, hier),
                         doctest::Contains("line 2"), LoadError);
  }
  SUBCASE("unknown category") {
    const std::string pois = dir.file(
        "p.csv",
        "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n"
        "A,48.0,11.0,casino,,,540,1020,1\n");
    CHECK_THROWS_WITH_AS(PoiCatalog::load(pois, hier),
                         doctest::Contains("casino"), LoadError);
  }
  SUBCASE("duplicate id") {
    const std::string pois = dir.file(
        "p.csv",
        "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n"
        "A,48.0,11.0,shopping,apparel,shoe_shop,540,1020,1\n"
        "A,48.0,11.1,shopping,apparel,shoe_shop,540,1020,1\n");
    CHECK_THROWS_WITH_AS(PoiCatalog::load(pois, hier),
                         doctest::Contains("duplicate"), LoadError);
  }
  SUBCASE("zero-minute opening interval") {
    const std::string pois = dir.file(
        "p.csv",
        "id,lat,lon,cat_l1,cat_l2,cat_l3,open_min,close_min,popularity\n"
        "A,48.0,11.0,shopping,apparel,shoe_shop,540,540,1\n");
    CHECK_THROWS_AS(PoiCatalog::load(pois, hier), LoadError);
  }
}

TEST_CASE("open_at handles plain and overnight spans") {
  const TimeAxis axis{60};
  OpenHours day{540, 1020};  // 9am - 5pm
  CHECK(day.contains_minute(600));
  CHECK_FALSE(day.contains_minute(1020));
  CHECK_FALSE(day.contains_minute(0));

  OpenHours night{1320, 120};  // 10pm - 2am
  CHECK(night.contains_minute(60));   // 1am
  CHECK_FALSE(night.contains_minute(720));  // noon
  CHECK(night.contains_minute(1380));

  const PoiCatalog cat = testutil::line_catalog(1, 1.0, 540, 1020);
  CHECK(cat.open_at(0, 10, axis));        // 10:00
  CHECK_FALSE(cat.open_at(0, 17, axis));  // 17:00 (close is exclusive)
}

TEST_CASE("open timesteps form one circular interval") {
  const TimeAxis axis{10};
  RngStream rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int open = static_cast<int>(rng.next_below(1440));
    int close = static_cast<int>(rng.next_below(1440));
    if (close == open) close = (close + 30) % 1440;
    OpenHours hours{open, close};
    // count transitions closed->open around the circular day
    int transitions = 0;
    for (int t = 0; t < axis.num_steps(); ++t) {
      const bool now = hours.contains_minute(axis.minute_of(t));
      const bool prev = hours.contains_minute(
          axis.minute_of((t + axis.num_steps() - 1) % axis.num_steps()));
      if (now && !prev) ++transitions;
    }
    CHECK(transitions <= 1);
  }
}

TEST_CASE("grid cells tie to the lower index on boundaries") {
  // 4 POIs spanning a box; boundary point goes to the lower cell
  CategoryHierarchy h = testutil::small_hierarchy();
  std::vector<Poi> pois;
  auto add = [&](const char* n, double lat, double lon) {
    Poi p;
    p.name = n;
    p.lat = lat;
    p.lon = lon;
    p.category_path = {0, 2, 6};
    p.hours = {0, 1440};
    pois.push_back(p);
  };
  add("sw", 48.0, 11.0);
  add("ne", 48.4, 11.4);
  add("mid", 48.2, 11.2);  // exactly on the 2x2 boundary in both axes
  add("q2", 48.3, 11.1);
  const PoiCatalog cat = PoiCatalog::from_parts(std::move(h), std::move(pois));
  CHECK(cat.grid_cell_of(0, 2) == 0);
  CHECK(cat.grid_cell_of(1, 2) == 3);
  CHECK(cat.grid_cell_of(2, 2) == 0);  // boundary tie
  CHECK(cat.grid_cell_of(3, 2) == 2);
}

TEST_CASE("physical distance via catalog matches direct haversine") {
  const PoiCatalog cat = testutil::line_catalog(3, 2.0);
  CHECK(cat.distance_km(0, 1) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(cat.distance_km(0, 2) == doctest::Approx(4.0).epsilon(0.01));
  CHECK(cat.distance_km(1, 1) == 0.0);
}

TEST_CASE("reachable self for every gap") {
  const PoiCatalog cat = testutil::line_catalog(4, 5.0);
  for (int p = 0; p < cat.size(); ++p) {
    CHECK(cat.reachable(p, p, 8, 1));
    CHECK(cat.reachable(p, p, 8, 600));
  }
}

TEST_CASE("per-hour speed profile changes reachability by departure time") {
  SpeedProfile walk_then_bus(4.0);
  std::array<double, 24> table{};
  table.fill(4.0);
  for (int h = 7; h < 10; ++h) table[h] = 16.0;  // faster in the morning
  walk_then_bus.by_hour = table;
  CHECK(walk_then_bus.at_minute(8 * 60) == 16.0);
  CHECK(walk_then_bus.at_minute(12 * 60) == 4.0);
  CHECK(walk_then_bus.at_minute(25 * 60) == 4.0);  // wraps past midnight
  CHECK(walk_then_bus.max_kmh() == 16.0);

  const PoiCatalog cat = testutil::line_catalog(2, 2.0, 0, 1440);
  const TimeAxis axis{10};
  Trajectory morning, noon;
  morning.points = {{0, 48}, {1, 50}};  // 20-min gap departing 8am
  noon.points = {{0, 72}, {1, 74}};
  CHECK_FALSE(validate_trajectory(morning, cat, axis, walk_then_bus));
  CHECK(validate_trajectory(noon, cat, axis, walk_then_bus) ==
        InfeasibleReason::Unreachable);
  // the constant default treats both alike
  CHECK(validate_trajectory(morning, cat, axis, 4.0) ==
        InfeasibleReason::Unreachable);
}

TEST_CASE("distance override replaces haversine") {
  PoiCatalog cat = testutil::line_catalog(3, 1.0, 0, 1440);
  std::vector<double> table(9, 0.0);
  table[0 * 3 + 1] = 7.0;
  table[1 * 3 + 0] = 2.0;  // asymmetric one-way pair
  cat.set_distance_override(table);
  CHECK(cat.distance_km(0, 1) == 7.0);
  CHECK(cat.distance_km(1, 0) == 2.0);
  CHECK(cat.reachable(1, 0, 8, 20));
  CHECK_FALSE(cat.reachable(0, 1, 8, 20));
  CHECK_THROWS_AS(cat.set_distance_override(std::vector<double>(4, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("bucketed box queries match a linear scan") {
  RngStream rng(77);
  const PoiCatalog cat = testutil::random_catalog(rng, 60, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    BoundingBox box;
    box.extend(48.0 + rng.next_double() * 0.1, 11.0 + rng.next_double() * 0.15);
    box.extend(48.0 + rng.next_double() * 0.1, 11.0 + rng.next_double() * 0.15);
    std::vector<int> expect;
    for (int i = 0; i < cat.size(); ++i)
      if (box.contains(cat.poi(i).lat, cat.poi(i).lon)) expect.push_back(i);
    std::vector<int> got = cat.pois_in_box(box);
    std::sort(got.begin(), got.end());
    CHECK(got == expect);
  }
}
