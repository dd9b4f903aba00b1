#ifndef GRAMSHIELD_PERTURB_HPP
#define GRAMSHIELD_PERTURB_HPP

#include "gramshield/distance.hpp"
#include "gramshield/em.hpp"
#include "gramshield/ngram.hpp"
#include "gramshield/trajectory.hpp"

namespace gramshield {

// One perturbed gram covering trajectory indices [first, last] (0-based,
// inclusive).
struct PerturbEntry {
  int first = 0;
  int last = 0;
  std::vector<int> gram;

  int length() const { return last - first + 1; }
};

// The multiset Z of perturbed overlapping n-grams: |tau| + n - 1 entries,
// each index covered exactly n times.
struct PerturbRecord {
  std::vector<PerturbEntry> entries;
  int trajectory_len = 0;
  int n = 0;
  double epsilon = 0;
  double eps_per_call = 0;

  int call_count() const { return static_cast<int>(entries.size()); }
};

// eps' = eps / (|tau| + n - 1)
double split_budget(double eps, int traj_len, int n);

// Per-call sensitivities indexed by gram length; precomputed once per run
// so every trajectory shares identical bounds.
struct SensitivitySchedule {
  std::vector<double> by_length;  // [k-1] bounds length-k gram distance

  double for_length(int k) const { return by_length[k - 1]; }
};

SensitivitySchedule make_sensitivity_schedule(const PoiCatalog& catalog,
                                              const DistanceParams& params,
                                              int max_n);

// Main pass over W^n for every window [a, a+n-1], plus prefix/suffix
// supplementary passes over W^k (k = 1..n-1) so end indices reach the same
// coverage. Every call runs the exponential mechanism at eps'.
// When |tau| < n the gram length degrades to |tau|.
PerturbRecord perturb_trajectory(const RegionTrajectory& traj,
                                 const NGramFamily& grams,
                                 const DistanceMatrix& dist,
                                 const SensitivitySchedule& sens, double eps,
                                 RngStream& rng);

// Number of entries covering each trajectory index.
std::vector<int> coverage_histogram(const PerturbRecord& record);

}  // namespace gramshield

#endif
