#include "gramshield/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace gramshield {

NGramSet::NGramSet(int n, std::vector<int> flat) : n_(n), flat_(std::move(flat)) {
  if (n_ > 0 && flat_.size() % n_ != 0)
    throw std::invalid_argument("flat gram buffer not a multiple of n");
  int domain = 0;
  for (int r : flat_) domain = std::max(domain, r + 1);
  by_region_.assign(domain, {});
  for (size_t g = 0; g < size(); ++g)
    for (int r : gram(g))
      if (by_region_[r].empty() || by_region_[r].back() != static_cast<int>(g))
        by_region_[r].push_back(static_cast<int>(g));
}

const std::vector<int>& NGramSet::grams_containing(int region) const {
  static const std::vector<int> kEmpty;
  if (region < 0 || region >= static_cast<int>(by_region_.size()))
    return kEmpty;
  return by_region_[region];
}

bool gram_pair_valid(const PoiCatalog& catalog, const StcRegion& a,
                     const StcRegion& b, double speed_kmh,
                     double min_gap_min) {
  const int earliest_a =
      *std::min_element(a.time_slots.begin(), a.time_slots.end());
  const int latest_b =
      *std::max_element(b.time_slots.begin(), b.time_slots.end());
  if (latest_b < earliest_a) return false;  // would move backward in time
  return region_reachable(catalog, a, b, speed_kmh, min_gap_min);
}

NGramSet build_ngram_set(const PoiCatalog& catalog, const RegionSet& regions,
                         int n, double speed_kmh, double min_gap_min,
                         size_t cap) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int R = regions.size();

  if (n >= 3) {
    const double total = std::pow(static_cast<double>(R), n);
    if (total > static_cast<double>(cap))
      throw NGramCapExceeded(
          "materializing W^" + std::to_string(n) + " over " +
          std::to_string(R) + " regions exceeds the configured cap (" +
          std::to_string(cap) + "); filter n-grams on the fly instead");
  }

  std::vector<int> flat;
  if (n == 1) {
    flat.reserve(R);
    for (int r = 0; r < R; ++r) flat.push_back(r);
    return NGramSet(1, std::move(flat));
  }

  // valid adjacent pairs, then extend length by length
  std::vector<std::vector<int>> next(R);
  for (int a = 0; a < R; ++a)
    for (int b = 0; b < R; ++b)
      if (gram_pair_valid(catalog, regions.region(a), regions.region(b),
                          speed_kmh, min_gap_min))
        next[a].push_back(b);

  std::vector<int> prefix(1);
  std::function<void(int, int)> extend = [&](int last, int depth) {
    if (depth == n) {
      flat.insert(flat.end(), prefix.begin(), prefix.end());
      return;
    }
    for (int b : next[last]) {
      prefix.push_back(b);
      extend(b, depth + 1);
      prefix.pop_back();
    }
  };
  for (int a = 0; a < R; ++a) {
    prefix[0] = a;
    prefix.resize(1);
    extend(a, 1);
  }
  return NGramSet(n, std::move(flat));
}

NGramFamily build_ngram_family(const PoiCatalog& catalog,
                               const RegionSet& regions, int max_n,
                               double speed_kmh, double min_gap_min,
                               size_t cap) {
  NGramFamily fam;
  for (int k = 1; k <= max_n; ++k)
    fam.sets.push_back(
        build_ngram_set(catalog, regions, k, speed_kmh, min_gap_min, cap));
  return fam;
}

}  // namespace gramshield
