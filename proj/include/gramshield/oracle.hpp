#ifndef GRAMSHIELD_ORACLE_HPP
#define GRAMSHIELD_ORACLE_HPP

#include "gramshield/reconstruct.hpp"

namespace gramshield {

// Worst-case number of feasible trajectories:
// |P|^|tau| * C(|T|, |tau|) * mu^(|tau|-1), evaluated in log space.
// mu is the average fraction of POIs reachable between successive steps.
double cardinality_s(double num_pois, int traj_len, int gt_minutes, double mu);

struct OracleGuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kEnumerationGuard = 1e6;

// Every strictly monotone, link-reachable, open-hours-valid POI-timestep
// sequence of the given length. Refuses when the unconstrained count
// |P|^len * C(|T|, len) exceeds the guard; at city scale this set cannot
// be instantiated, which is the whole reason the n-gram mechanism exists.
std::vector<std::vector<TrajPoint>> enumerate_s(const PoiCatalog& catalog,
                                                const TimeAxis& axis, int len,
                                                const SpeedProfile& speed,
                                                double guard = kEnumerationGuard);

// Elementwise trajectory distance used by the global mechanism:
// sum_i sqrt(d_s^2 + d_t^2 + d_c^2) on POI-timestep pairs.
double trajectory_distance(const std::vector<TrajPoint>& a,
                           const std::vector<TrajPoint>& b,
                           const PoiCatalog& catalog, const TimeAxis& axis,
                           const DistanceParams& params);

// Single exponential-mechanism draw over the enumerated S.
std::vector<TrajPoint> global_perturb(const std::vector<TrajPoint>& traj,
                                      const std::vector<std::vector<TrajPoint>>& s,
                                      const PoiCatalog& catalog,
                                      const TimeAxis& axis,
                                      const DistanceParams& params, double eps,
                                      RngStream& rng);

// Exhaustive minimizer of the bigram-error objective over all
// continuity-respecting candidate sequences; identical cost accumulation
// and tie-breaking as solve_region_path, so results must match bit for bit.
RegionPathResult brute_force_reconstruct(const ReconstructionInstance& instance,
                                         double guard = kEnumerationGuard);

}  // namespace gramshield

#endif
