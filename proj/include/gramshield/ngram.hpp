#ifndef GRAMSHIELD_NGRAM_HPP
#define GRAMSHIELD_NGRAM_HPP

#include <span>
#include <vector>

#include "gramshield/regions.hpp"

namespace gramshield {

// Reachability-filtered set of length-n region sequences: every adjacent
// pair is region-reachable and never moves backward in time. Immutable
// after construction; safe for concurrent reads.
class NGramSet {
 public:
  NGramSet() = default;
  NGramSet(int n, std::vector<int> flat);

  int n() const { return n_; }
  size_t size() const { return n_ == 0 ? 0 : flat_.size() / n_; }
  std::span<const int> gram(size_t i) const {
    return {flat_.data() + i * n_, static_cast<size_t>(n_)};
  }
  const std::vector<int>& flat() const { return flat_; }

  // Indices of grams containing `region`.
  const std::vector<int>& grams_containing(int region) const;

 private:
  int n_ = 0;
  std::vector<int> flat_;
  std::vector<std::vector<int>> by_region_;
};

struct NGramCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr size_t kDefaultNGramCap = 4'000'000;

// All length-n sequences whose adjacent pairs pass region_reachable at
// gap `min_gap_min` and whose time windows are non-decreasing. Refuses to
// materialize n >= 3 when |regions|^n exceeds `cap` (use on-the-fly
// filtering at that scale instead).
NGramSet build_ngram_set(const PoiCatalog& catalog, const RegionSet& regions,
                         int n, double speed_kmh, double min_gap_min,
                         size_t cap = kDefaultNGramCap);

// Pairwise validity shared by gram construction and tests: reachable and
// not strictly backward in time (the latest slot of b must not precede the
// earliest slot of a).
bool gram_pair_valid(const PoiCatalog& catalog, const StcRegion& a,
                     const StcRegion& b, double speed_kmh, double min_gap_min);

// W^1..W^n for one region set; grams[k-1] holds W^k.
struct NGramFamily {
  std::vector<NGramSet> sets;

  const NGramSet& of_length(int k) const { return sets[k - 1]; }
  int max_n() const { return static_cast<int>(sets.size()); }
};

NGramFamily build_ngram_family(const PoiCatalog& catalog,
                               const RegionSet& regions, int max_n,
                               double speed_kmh, double min_gap_min,
                               size_t cap = kDefaultNGramCap);

}  // namespace gramshield

#endif
