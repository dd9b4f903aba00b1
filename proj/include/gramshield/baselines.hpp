#ifndef GRAMSHIELD_BASELINES_HPP
#define GRAMSHIELD_BASELINES_HPP

#include <optional>
#include <string>

#include "gramshield/reconstruct.hpp"

namespace gramshield {

enum class MechanismKind { NGram, NGramNoH, PhysDist, IndReach, IndNoReach };

std::optional<MechanismKind> parse_mechanism(const std::string& name);
const char* mechanism_name(MechanismKind kind);

// Region-level n-gram perturbation driven by physical distance alone.
// Identical to perturb_trajectory except that `dist` and `sens` must be
// built with DistanceParams::space_only set.
PerturbRecord perturb_phys_dist(const RegionTrajectory& traj,
                                const NGramFamily& grams,
                                const DistanceMatrix& dist,
                                const SensitivitySchedule& sens, double eps,
                                RngStream& rng);

// POI-level n-gram family: pairs are POI-reachable at `min_gap_min` (no
// time windows exist at this level). Same materialization cap as the
// region-level builder.
NGramFamily build_poi_ngram_family(const PoiCatalog& catalog, int max_n,
                                   double speed_kmh, double min_gap_min,
                                   size_t cap = kDefaultNGramCap);

// NGramNoH output: overlapping POI grams plus one independent timestep
// perturbation per index, every call at eps / (2|tau| + n - 1).
struct NoHRecord {
  PerturbRecord poi_record;          // indices refer to POI ids
  std::vector<int> perturbed_steps;  // one timestep per trajectory index
  double eps_per_call = 0;
};

double split_budget_noh(double eps, int traj_len, int n);

NoHRecord perturb_ngram_noh(const Trajectory& traj, const NGramFamily& poi_grams,
                            const DistanceMatrix& poi_dist,
                            const SensitivitySchedule& poi_sens,
                            const TimeAxis& axis, const DistanceParams& params,
                            double eps, RngStream& rng);

struct IndependentStats {
  int restricted_fallbacks = 0;  // IndReach steps with no reachable candidate
  bool smoothed = false;
  bool dropped = false;
};

// Independent per-point perturbation over open (POI, timestep) pairs, one
// EM call per index at eps / |tau|. With enforce_reach the candidates for
// step i+1 are restricted to pairs reachable from the already-perturbed
// previous point; without it, times are repaired by post-processing.
std::optional<Trajectory> perturb_independent(
    const Trajectory& traj, const PoiCatalog& catalog,
    const DistanceMatrix& poi_dist, const TimeAxis& axis,
    const DistanceParams& params, const SpeedProfile& speed, double eps,
    bool enforce_reach, RngStream& rng, IndependentStats* stats = nullptr);

// All open (poi, timestep) pairs of the catalog, the Ind* candidate set.
std::vector<TrajPoint> open_poi_steps(const PoiCatalog& catalog,
                                      const TimeAxis& axis);

// POI-level analogue of the region reconstruction: spatial MBR pruning
// over the POIs named in the record, then the same layered-graph solve
// over POI bigrams.
RegionPathResult solve_poi_path(const PerturbRecord& poi_record,
                                const PoiCatalog& catalog,
                                const NGramSet& poi_bigrams,
                                const DistanceMatrix& poi_dist,
                                double slack_km);

}  // namespace gramshield

#endif
