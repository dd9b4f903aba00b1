#include <doctest.h>

#include <cmath>
#include <set>

#include "gramshield/oracle.hpp"
#include "testutil.hpp"

using namespace gramshield;

TEST_CASE("cardinality formula reproduces the desk-scale figure") {
  // |P| = 1000, |tau| = 5, g_t = 15, mu = 0.2 -> about 9.78e19
  const double v = cardinality_s(1000, 5, 15, 0.2);
  CHECK(std::abs(v - 9.78e19) / 9.78e19 < 0.005);
}

TEST_CASE("cardinality degenerate and mu = 1 cases") {
  CHECK(cardinality_s(1, 1, 1440, 1.0) == doctest::Approx(1.0));
  // mu = 1 recovers the unconstrained product
  const double v = cardinality_s(10, 2, 720, 1.0);
  CHECK(v == doctest::Approx(100.0));  // 10^2 * C(2,2) * 1
  CHECK_THROWS_AS(cardinality_s(10, 5, 720, 1.0), std::invalid_argument);
}

TEST_CASE("enumerate_s on two always-open reachable POIs") {
  // |T| = 3, |tau| = 2 -> 4 POI pairs x C(3,2) timestep pairs = 12
  const PoiCatalog cat = testutil::line_catalog(2, 0.1, 0, 1440);
  const TimeAxis axis{480};
  const auto s = enumerate_s(cat, axis, 2, 8);
  CHECK(s.size() == 12);
  for (const auto& traj : s) {
    CHECK(traj.size() == 2);
    CHECK(traj[0].t < traj[1].t);
  }
}

TEST_CASE("enumerate_s under a near-zero threshold keeps same-POI pairs") {
  const PoiCatalog cat = testutil::line_catalog(2, 5.0, 0, 1440);
  const TimeAxis axis{480};
  const auto s = enumerate_s(cat, axis, 2, 1e-12);
  CHECK(s.size() == 6);  // 2 same-POI choices x 3 timestep pairs
  for (const auto& traj : s) CHECK(traj[0].poi == traj[1].poi);
}

TEST_CASE("enumerate_s of an empty catalog is empty") {
  CategoryHierarchy h = testutil::small_hierarchy();
  const PoiCatalog cat = PoiCatalog::from_parts(std::move(h), {});
  const auto s = enumerate_s(cat, TimeAxis{480}, 2, 8);
  CHECK(s.empty());
}

TEST_CASE("enumerate_s refuses oversized instances") {
  const PoiCatalog cat = testutil::line_catalog(40, 0.1, 0, 1440);
  CHECK_THROWS_AS(enumerate_s(cat, TimeAxis{10}, 5, 8), OracleGuardExceeded);
}

TEST_CASE("enumerate_s count matches the cardinality formula with exact mu") {
  // per-step reachable fraction computed from the instance
  const PoiCatalog cat = testutil::line_catalog(3, 1.0, 0, 1440);
  const TimeAxis axis{360};  // 4 timesteps
  const double speed = 8;
  const auto s = enumerate_s(cat, axis, 2, speed);
  // count reachable ordered POI pairs per timestep gap, averaged the way
  // the formula assumes: mu = fraction over all ordered pairs and gaps
  double total_pairs = 0, reachable_pairs = 0;
  for (int t1 = 0; t1 < 4; ++t1) {
    for (int t2 = t1 + 1; t2 < 4; ++t2) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          total_pairs += 1;
          reachable_pairs += cat.reachable(
              a, b, speed, (t2 - t1) * axis.step_minutes);
        }
      }
    }
  }
  const double mu = reachable_pairs / total_pairs;
  const double predicted = cardinality_s(3, 2, 360, mu);
  CHECK(static_cast<double>(s.size()) == doctest::Approx(predicted));
}

TEST_CASE("global_perturb: singleton S returns the input") {
  const PoiCatalog cat = testutil::line_catalog(1, 1.0, 0, 1440);
  const TimeAxis axis{720};
  std::vector<TrajPoint> traj{{0, 0}, {0, 1}};
  std::vector<std::vector<TrajPoint>> s{traj};
  RngStream rng(61);
  const auto out =
      global_perturb(traj, s, cat, axis, DistanceParams{}, 5.0, rng);
  CHECK(out == traj);
}

TEST_CASE("global_perturb: two-trajectory S follows the logistic weights") {
  const PoiCatalog cat = testutil::line_catalog(2, 1.0, 0, 1440);
  const TimeAxis axis{720};
  std::vector<TrajPoint> t0{{0, 0}};
  std::vector<TrajPoint> t1{{1, 0}};
  std::vector<std::vector<TrajPoint>> s{t0, t1};
  const DistanceParams params;
  // craft eps so that exp(-eps * d / (2 delta)) gives the 0.7311 split:
  // need eps * d / (2 delta) = 1
  const double delta =
      std::sqrt(std::pow(poi_sensitivity_bound(cat, params, 1), 2) +
                params.time_cap_hours * params.time_cap_hours);
  const double d01 =
      trajectory_distance(t0, t1, cat, axis, params);
  const double eps = 2.0 * delta / d01;
  RngStream rng(62);
  int zero = 0;
  const int runs = 100'000;
  for (int i = 0; i < runs; ++i) {
    const auto out = global_perturb(t0, s, cat, axis, params, eps, rng);
    if (out == t0) ++zero;
  }
  CHECK(std::abs(zero / static_cast<double>(runs) - 0.7311) < 0.01);
}

TEST_CASE("global utility tail bound on a 12-trajectory S") {
  const PoiCatalog cat = testutil::line_catalog(2, 0.1, 0, 1440);
  const TimeAxis axis{480};
  const auto s = enumerate_s(cat, axis, 2, 8);
  REQUIRE(s.size() == 12);
  const DistanceParams params;
  std::vector<TrajPoint> truth = s[0];
  std::vector<double> distances(s.size());
  for (size_t i = 0; i < s.size(); ++i)
    distances[i] = trajectory_distance(truth, s[i], cat, axis, params);
  const double delta =
      2.0 * std::sqrt(std::pow(poi_sensitivity_bound(cat, params, 1), 2) +
                      params.time_cap_hours * params.time_cap_hours);
  for (double zeta : {1.0, 2.0}) {
    RngStream rng(63);
    const double tail = utility_tail(distances, 8.0, delta, zeta, 10'000, rng);
    const double sigma =
        std::sqrt(std::exp(-zeta) * (1 - std::exp(-zeta)) / 10'000);
    CHECK(tail <= std::exp(-zeta) + 3 * sigma);
  }
}

TEST_CASE("brute force reconstruct: guard and argmin cases") {
  const auto world = testutil::make_toy_world(
      testutil::line_catalog(5, 0.4), 2, 1440, 8, 2, 1, 60);
  PerturbRecord rec;
  rec.trajectory_len = 1;
  rec.n = 1;
  rec.entries.push_back(PerturbEntry{0, 0, {1}});
  ReconstructionInstance inst =
      mbr_prune(rec, world.regions, world.catalog, world.grams.of_length(2),
                world.dist, std::numeric_limits<double>::infinity());
  const RegionPathResult res = brute_force_reconstruct(inst);
  CHECK(res.path == RegionTrajectory{1});
  CHECK(res.objective == 0);

  PerturbRecord big;
  big.trajectory_len = 12;
  big.n = 2;
  for (int a = 0; a + 1 < 12; ++a)
    big.entries.push_back(PerturbEntry{a, a + 1, {0, 1}});
  big.entries.push_back(PerturbEntry{0, 0, {0}});
  big.entries.push_back(PerturbEntry{11, 11, {1}});
  ReconstructionInstance inst2 =
      mbr_prune(big, world.regions, world.catalog, world.grams.of_length(2),
                world.dist, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(brute_force_reconstruct(inst2, /*guard=*/1000),
                  OracleGuardExceeded);
}

TEST_CASE("global_perturb requires the input to be in S") {
  const PoiCatalog cat = testutil::line_catalog(2, 0.1, 0, 1440);
  const TimeAxis axis{480};
  const auto s = enumerate_s(cat, axis, 2, 8);
  std::vector<TrajPoint> outsider{{0, 0}, {0, 0}};  // non-monotone, not in S
  RngStream rng(64);
  CHECK_THROWS_AS(
      global_perturb(outsider, s, cat, axis, DistanceParams{}, 5.0, rng),
      std::invalid_argument);
}
