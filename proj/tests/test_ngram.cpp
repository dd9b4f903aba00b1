#include <doctest.h>

#include <set>

#include "testutil.hpp"

using namespace gramshield;

namespace {

// independent full-product filter used as the oracle
std::set<std::vector<int>> brute_force_grams(const PoiCatalog& cat,
                                             const RegionSet& set, int n,
                                             double speed, double gap) {
  std::set<std::vector<int>> out;
  std::vector<int> idx(n, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < n && ok; ++i)
      ok = gram_pair_valid(cat, set.region(idx[i]), set.region(idx[i + 1]),
                           speed, gap);
    if (ok) out.insert(idx);
    int i = n - 1;
    while (i >= 0 && ++idx[i] == set.size()) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

std::set<std::vector<int>> as_set(const NGramSet& grams) {
  std::set<std::vector<int>> out;
  for (size_t g = 0; g < grams.size(); ++g) {
    auto w = grams.gram(g);
    out.insert(std::vector<int>(w.begin(), w.end()));
  }
  return out;
}

}  // namespace

TEST_CASE("W^1 is the full region set") {
  const auto world = testutil::make_toy_world(
      testutil::line_catalog(6, 0.3), 2, 60, 8, 2, 1, 60);
  const NGramSet& unigrams = world.grams.of_length(1);
  CHECK(static_cast<int>(unigrams.size()) == world.regions.size());
}

TEST_CASE("three mutually reachable same-window regions give 9 bigrams") {
  // 3 POIs 100 m apart, always open, one slot covering the whole day
  CategoryHierarchy h = testutil::small_hierarchy();
  std::vector<Poi> pois;
  const int leaves[3] = {h.find("shoe_shop"), h.find("phone_store"),
                         h.find("bar")};
  for (int i = 0; i < 3; ++i) {
    Poi p;
    p.name = "P" + std::to_string(i);
    p.lat = 48.0;
    p.lon = 11.0 + i * 0.0013;
    p.category_path = {h.parent(h.parent(leaves[i])), h.parent(leaves[i]),
                       leaves[i]};
    p.hours = {0, 1440};
    p.popularity = 1;
    pois.push_back(p);
  }
  const PoiCatalog cat = PoiCatalog::from_parts(std::move(h), std::move(pois));
  const RegionSet set = build_regions(cat, 1, 1440);
  REQUIRE(set.size() == 3);
  const NGramSet bigrams = build_ngram_set(cat, set, 2, 8, 60);
  CHECK(bigrams.size() == 9);
}

TEST_CASE("bigram set equals the brute-force filter on random instances") {
  RngStream rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const PoiCatalog cat = testutil::random_catalog(rng, 12, 5.0, 420, 1320);
    const RegionSet set = build_regions(cat, 2, 480);
    if (set.size() > 15) continue;
    const NGramSet bigrams = build_ngram_set(cat, set, 2, 8, 30);
    CHECK(as_set(bigrams) == brute_force_grams(cat, set, 2, 8, 30));
  }
}

TEST_CASE("trigram set equals the brute-force filter") {
  RngStream rng(22);
  const PoiCatalog cat = testutil::random_catalog(rng, 8, 2.0, 480, 1020);
  const RegionSet set = build_regions(cat, 1, 360);
  REQUIRE(set.size() <= 15);
  const NGramSet trigrams = build_ngram_set(cat, set, 3, 8, 60);
  CHECK(as_set(trigrams) == brute_force_grams(cat, set, 3, 8, 60));
}

TEST_CASE("gram sets grow monotonically with theta") {
  RngStream rng(23);
  const PoiCatalog cat = testutil::random_catalog(rng, 14, 6.0, 0, 1440);
  const RegionSet set = build_regions(cat, 2, 720);
  const NGramSet slow = build_ngram_set(cat, set, 2, 4, 30);
  const NGramSet fast = build_ngram_set(cat, set, 2, 16, 30);
  const auto sslow = as_set(slow);
  const auto sfast = as_set(fast);
  for (const auto& g : sslow) CHECK(sfast.count(g) == 1);
  CHECK(sfast.size() >= sslow.size());
}

TEST_CASE("time monotonicity: grams never step backward in time") {
  const PoiCatalog cat = testutil::line_catalog(2, 0.1, 480, 720);
  const RegionSet set = build_regions(cat, 1, 60);  // slots 8..11 per POI
  const NGramSet bigrams = build_ngram_set(cat, set, 2, 8, 60);
  for (size_t g = 0; g < bigrams.size(); ++g) {
    auto w = bigrams.gram(g);
    const auto& a = set.region(w[0]).time_slots;
    const auto& b = set.region(w[1]).time_slots;
    CHECK(*std::max_element(b.begin(), b.end()) >=
          *std::min_element(a.begin(), a.end()));
  }
  // a same-window pair is allowed; a strictly earlier one is not
  bool has_backward = false;
  for (size_t g = 0; g < bigrams.size(); ++g) {
    auto w = bigrams.gram(g);
    if (set.region(w[1]).time_slots.back() <
        set.region(w[0]).time_slots.front())
      has_backward = true;
  }
  CHECK_FALSE(has_backward);
}

TEST_CASE("memory guard refuses huge trigram materialization") {
  const auto world = testutil::make_toy_world(
      testutil::line_catalog(8, 0.2), 2, 240, 8, 2, 1, 60);
  CHECK_THROWS_AS(
      build_ngram_set(world.catalog, world.regions, 3, 8, 60, /*cap=*/10),
      NGramCapExceeded);
}

TEST_CASE("grams_containing index is consistent") {
  const auto world = testutil::make_toy_world(
      testutil::line_catalog(5, 0.4), 2, 480, 8, 2, 1, 60);
  const NGramSet& bigrams = world.grams.of_length(2);
  for (int r = 0; r < world.regions.size(); ++r) {
    for (int g : bigrams.grams_containing(r)) {
      auto w = bigrams.gram(g);
      CHECK((w[0] == r || w[1] == r));
    }
  }
}
