#ifndef GRAMSHIELD_RECONSTRUCT_HPP
#define GRAMSHIELD_RECONSTRUCT_HPP

#include <optional>

#include "gramshield/perturb.hpp"

namespace gramshield {

// Distance between a candidate region and everything Z says about index i:
// the sum of d(region, y_i) over every entry covering i, where y_i is the
// entry's element aligned with i.
double region_error(int region, int index, const PerturbRecord& record,
                    const DistanceMatrix& dist);

// e(i, w) = region_error(w1, i) + region_error(w2, i+1)
double bigram_error(int index, int region_a, int region_b,
                    const PerturbRecord& record,
                    const DistanceMatrix& dist);

// Candidate regions/bigrams after MBR pruning, with region errors
// precomputed for every (index, candidate). Reconstruction sees only the
// perturbed record and public data; the true trajectory never enters.
class ReconstructionInstance {
 public:
  ReconstructionInstance(const PerturbRecord& record,
                         std::vector<int> candidate_regions,
                         std::vector<std::pair<int, int>> candidate_bigrams,
                         const DistanceMatrix& dist);

  const PerturbRecord& record() const { return *record_; }
  int traj_len() const { return record_->trajectory_len; }
  const std::vector<int>& candidate_regions() const { return regions_; }
  const std::vector<std::pair<int, int>>& candidate_bigrams() const {
    return bigrams_;
  }
  int slot_of(int region) const;  // -1 when region not a candidate
  double error_at(int index, int slot) const {
    return errors_[static_cast<size_t>(index) * regions_.size() + slot];
  }

 private:
  const PerturbRecord* record_;
  std::vector<int> regions_;  // sorted by region id
  std::vector<std::pair<int, int>> bigrams_;
  std::vector<double> errors_;
  std::unordered_map<int, int> slot_index_;
};

// Restrict candidates to the spatial bounding box of Z's member POIs
// (grown by slack_km) and to regions whose window meets Z's time envelope
// +-1h. Regions appearing in Z always survive. A non-finite slack disables
// pruning entirely.
ReconstructionInstance mbr_prune(const PerturbRecord& record,
                                 const RegionSet& regions,
                                 const PoiCatalog& catalog,
                                 const NGramSet& bigrams,
                                 const DistanceMatrix& dist,
                                 double slack_km);

// Slack used when none is configured: the distance coverable across the
// record's own time envelope, so pruning never outruns the data.
double default_mbr_slack_km(const PerturbRecord& record,
                            const RegionSet& regions, double speed_kmh);

struct RegionPathResult {
  RegionTrajectory path;
  double objective = 0;
  // set when the bigram graph admits no full path and the solver degraded
  // to independent per-index argmins
  bool fallback = false;
};

// Exact optimum of the bigram-error program via shortest path in a layered
// graph; ties broken lexicographically by region id sequence. A length-1
// trajectory reduces to the argmin region error.
RegionPathResult solve_region_path(const ReconstructionInstance& instance);

struct PoiSampleStats {
  long long attempts = 0;
  int smoothing_invoked = 0;
  int region_changed_points = 0;
  bool dropped = false;
};

// Uniform draw of an open (POI, timestep) pair per region, accepted when
// the whole trajectory is strictly monotone and link-reachable. Small
// instances are enumerated exactly; larger ones are rejection-sampled up
// to `gamma` attempts, after which times are smoothed. Returns nullopt
// only when smoothing cannot produce a feasible day.
std::optional<Trajectory> sample_poi_trajectory(
    const RegionTrajectory& path, const RegionSet& regions,
    const PoiCatalog& catalog, const TimeAxis& axis, const SpeedProfile& speed,
    long long gamma, RngStream& rng, PoiSampleStats* stats = nullptr);

// Forward pass pushes each timestep later (in g_t steps) until its link is
// feasible and the POI is open; hitting the end of the day triggers a
// backward pass that pulls earlier points earlier. POI identities never
// change. Returns false when no feasible assignment exists.
bool time_smooth(std::vector<TrajPoint>& points, const PoiCatalog& catalog,
                 const TimeAxis& axis, const SpeedProfile& speed);

inline constexpr long long kDefaultGamma = 50'000;
inline constexpr long long kEnumerationLimit = 10'000;

}  // namespace gramshield

#endif
