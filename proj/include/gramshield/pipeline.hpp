#ifndef GRAMSHIELD_PIPELINE_HPP
#define GRAMSHIELD_PIPELINE_HPP

#include "gramshield/baselines.hpp"
#include "gramshield/index_io.hpp"

namespace gramshield {

struct RunStats {
  long long em_calls = 0;
  double budget_spent = 0;  // sum of per-call budgets across trajectories
  long long sample_attempts = 0;
  int smoothing_invoked = 0;
  int dp_fallbacks = 0;
  int reach_fallbacks = 0;
  int region_changed_points = 0;
  int dropped = 0;
};

struct PerturbRun {
  TrajectorySet output;  // input order, dropped trajectories omitted
  std::vector<std::string> dropped_users;
  RunStats stats;
};

// Filtered input -> perturb -> reconstruct -> POI sampling for one
// mechanism. Trajectory i always uses rng substream i, so results are
// independent of `jobs` and of scheduling order.
PerturbRun run_mechanism(MechanismKind kind, const BuildIndex& index,
                         const TrajectorySet& input, double eps,
                         std::uint64_t seed, int jobs);

// Convenience wrapper for one trajectory through the full NGram path
// (used by tests and the runtime criterion).
std::optional<Trajectory> perturb_one_ngram(const BuildIndex& index,
                                            const Trajectory& traj, double eps,
                                            RngStream& rng,
                                            RunStats* stats = nullptr);

}  // namespace gramshield

#endif
