#include "gramshield/perturb.hpp"

#include <stdexcept>

namespace gramshield {

double split_budget(double eps, int traj_len, int n) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  if (traj_len < 1 || n < 1)
    throw std::invalid_argument("trajectory length and n must be >= 1");
  return eps / (traj_len + n - 1);
}

SensitivitySchedule make_sensitivity_schedule(const PoiCatalog& catalog,
                                              const DistanceParams& params,
                                              int max_n) {
  SensitivitySchedule s;
  for (int k = 1; k <= max_n; ++k)
    s.by_length.push_back(sensitivity_bound(catalog, params, k));
  return s;
}

namespace {

// One EM call: perturb the true sub-gram traj[first..last] over W^k.
PerturbEntry perturb_window(const RegionTrajectory& traj, int first, int last,
                            const NGramSet& candidates,
                            const DistanceMatrix& dist, double eps_call,
                            double delta, RngStream& rng) {
  const int k = last - first + 1;
  if (candidates.size() == 0)
    throw std::runtime_error("no candidate grams of length " +
                             std::to_string(k));
  std::span<const int> truth(traj.data() + first, static_cast<size_t>(k));
  std::vector<double> distances(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i)
    distances[i] = gram_distance(dist, truth, candidates.gram(i));
  const EmDistribution em = em_distribution(distances, eps_call, delta);
  const int pick = em_sample(em, rng);
  auto g = candidates.gram(pick);
  return PerturbEntry{first, last, std::vector<int>(g.begin(), g.end())};
}

}  // namespace

PerturbRecord perturb_trajectory(const RegionTrajectory& traj,
                                 const NGramFamily& grams,
                                 const DistanceMatrix& dist,
                                 const SensitivitySchedule& sens, double eps,
                                 RngStream& rng) {
  const int len = static_cast<int>(traj.size());
  if (len < 1) throw std::invalid_argument("empty trajectory");
  const int n = std::min(grams.max_n(), len);

  PerturbRecord rec;
  rec.trajectory_len = len;
  rec.n = n;
  rec.epsilon = eps;
  rec.eps_per_call = split_budget(eps, len, n);

  // main pass: every window of length n
  for (int a = 0; a + n <= len; ++a)
    rec.entries.push_back(perturb_window(traj, a, a + n - 1,
                                         grams.of_length(n), dist,
                                         rec.eps_per_call,
                                         sens.for_length(n), rng));

  // end effects: prefixes and suffixes of lengths 1..n-1
  for (int k = 1; k < n; ++k) {
    rec.entries.push_back(perturb_window(traj, 0, k - 1, grams.of_length(k),
                                         dist, rec.eps_per_call,
                                         sens.for_length(k), rng));
    rec.entries.push_back(perturb_window(traj, len - k, len - 1,
                                         grams.of_length(k), dist,
                                         rec.eps_per_call,
                                         sens.for_length(k), rng));
  }
  return rec;
}

std::vector<int> coverage_histogram(const PerturbRecord& record) {
  std::vector<int> counts(record.trajectory_len, 0);
  for (const PerturbEntry& e : record.entries)
    for (int i = e.first; i <= e.last; ++i) ++counts[i];
  return counts;
}

}  // namespace gramshield
