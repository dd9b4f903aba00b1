#include "gramshield/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gramshield/em.hpp"

namespace gramshield {

double cardinality_s(double num_pois, int traj_len, int gt_minutes,
                     double mu) {
  if (gt_minutes <= 0 || 1440 % gt_minutes != 0)
    throw std::invalid_argument("time granularity must divide 1440");
  const int num_steps = 1440 / gt_minutes;
  if (traj_len < 1 || traj_len > num_steps)
    throw std::invalid_argument("trajectory length exceeds the timestep count");
  if (num_pois < 1 || mu <= 0 || mu > 1)
    throw std::invalid_argument("need |P| >= 1 and mu in (0, 1]");
  const double log_pois = traj_len * std::log(num_pois);
  const double log_choose = std::lgamma(num_steps + 1.0) -
                            std::lgamma(traj_len + 1.0) -
                            std::lgamma(num_steps - traj_len + 1.0);
  const double log_mu = (traj_len - 1) * std::log(mu);
  return std::exp(log_pois + log_choose + log_mu);
}

std::vector<std::vector<TrajPoint>> enumerate_s(const PoiCatalog& catalog,
                                                const TimeAxis& axis, int len,
                                                const SpeedProfile& speed,
                                                double guard) {
  if (len < 1) throw std::invalid_argument("trajectory length must be >= 1");
  if (catalog.size() == 0) return {};
  const double worst =
      cardinality_s(catalog.size(), len, axis.step_minutes, 1.0);
  if (worst > guard)
    throw OracleGuardExceeded(
        "instantiating S is infeasible here: worst-case |S| = " +
        std::to_string(worst) + " exceeds the guard of " +
        std::to_string(guard));

  std::vector<std::vector<TrajPoint>> out;
  std::vector<TrajPoint> cur(len);
  const int T = axis.num_steps();

  std::function<void(int)> extend = [&](int i) {
    if (i == len) {
      out.push_back(cur);
      return;
    }
    const int t_lo = (i == 0) ? 0 : cur[i - 1].t + 1;
    for (int t = t_lo; t < T; ++t) {
      for (int p = 0; p < catalog.size(); ++p) {
        if (!catalog.open_at(p, t, axis)) continue;
        if (i > 0) {
          const double gap_min =
              static_cast<double>(t - cur[i - 1].t) * axis.step_minutes;
          const double kmh = speed.at_minute(axis.minute_of(cur[i - 1].t));
          if (!catalog.reachable(cur[i - 1].poi, p, kmh, gap_min)) continue;
        }
        cur[i] = TrajPoint{p, t};
        extend(i + 1);
      }
    }
  };
  extend(0);
  return out;
}

double trajectory_distance(const std::vector<TrajPoint>& a,
                           const std::vector<TrajPoint>& b,
                           const PoiCatalog& catalog, const TimeAxis& axis,
                           const DistanceParams& params) {
  if (a.size() != b.size())
    throw std::invalid_argument("trajectory_distance: length mismatch");
  double sum = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double ds =
        params.weight_space * catalog.distance_km(a[i].poi, b[i].poi);
    const double dt = params.weight_time *
                      time_distance_hours(axis.minute_of(a[i].t),
                                          axis.minute_of(b[i].t), params);
    const double dc =
        params.weight_category *
        category_distance(catalog.hierarchy(),
                          catalog.poi(a[i].poi).leaf_category(),
                          catalog.poi(b[i].poi).leaf_category(), params);
    sum += std::sqrt(ds * ds + dt * dt + dc * dc);
  }
  return sum;
}

std::vector<TrajPoint> global_perturb(
    const std::vector<TrajPoint>& traj,
    const std::vector<std::vector<TrajPoint>>& s, const PoiCatalog& catalog,
    const TimeAxis& axis, const DistanceParams& params, double eps,
    RngStream& rng) {
  if (s.empty()) throw std::invalid_argument("S is empty");
  if (std::find(s.begin(), s.end(), traj) == s.end())
    throw std::invalid_argument(
        "the input trajectory is not a member of the enumerated S");
  std::vector<double> distances(s.size());
  for (size_t i = 0; i < s.size(); ++i)
    distances[i] = trajectory_distance(traj, s[i], catalog, axis, params);
  const double delta =
      static_cast<double>(traj.size()) *
      std::sqrt(std::pow(poi_sensitivity_bound(catalog, params, 1), 2) +
                params.time_cap_hours * params.time_cap_hours);
  const EmDistribution em = em_distribution(distances, eps, delta);
  return s[em_sample(em, rng)];
}

RegionPathResult brute_force_reconstruct(
    const ReconstructionInstance& instance, double guard) {
  const int len = instance.traj_len();
  const auto& cands = instance.candidate_regions();
  const int C = static_cast<int>(cands.size());
  if (C == 0) throw std::invalid_argument("no candidate regions");
  if (std::pow(static_cast<double>(C), len) > guard)
    throw OracleGuardExceeded("brute-force reconstruction guard exceeded");

  RegionPathResult best;
  if (len == 1) {
    int bs = 0;
    for (int s = 1; s < C; ++s)
      if (instance.error_at(0, s) < instance.error_at(0, bs)) bs = s;
    best.path = {cands[bs]};
    best.objective = instance.error_at(0, bs);
    return best;
  }

  std::vector<std::vector<bool>> edge(C, std::vector<bool>(C, false));
  for (const auto& [ra, rb] : instance.candidate_bigrams()) {
    const int sa = instance.slot_of(ra);
    const int sb = instance.slot_of(rb);
    if (sa >= 0 && sb >= 0) edge[sa][sb] = true;
  }

  // cost folded right to left, exactly as the layered-graph solver folds
  // its suffix costs, so equal-cost comparisons are bitwise
  auto path_cost = [&](const std::vector<int>& slots) {
    double acc = 0;
    for (int i = len - 2; i >= 0; --i)
      acc = instance.error_at(i, slots[i]) +
            instance.error_at(i + 1, slots[i + 1]) + acc;
    return acc;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> slots(len, 0), best_slots;
  std::function<void(int)> walk = [&](int i) {
    if (i == len) {
      const double c = path_cost(slots);
      if (c < best_cost) {  // lexicographic enumeration keeps the first min
        best_cost = c;
        best_slots = slots;
      }
      return;
    }
    for (int s = 0; s < C; ++s) {
      if (i > 0 && !edge[slots[i - 1]][s]) continue;
      slots[i] = s;
      walk(i + 1);
    }
  };
  walk(0);

  if (best_slots.empty()) {
    best.fallback = true;
    best.path.resize(len);
    double obj = 0;
    for (int i = 0; i < len; ++i) {
      int bs = 0;
      for (int s = 1; s < C; ++s)
        if (instance.error_at(i, s) < instance.error_at(i, bs)) bs = s;
      best.path[i] = cands[bs];
      obj += instance.error_at(i, bs);
    }
    best.objective = obj;
    return best;
  }
  best.objective = best_cost;
  best.path.resize(len);
  for (int i = 0; i < len; ++i) best.path[i] = cands[best_slots[i]];
  return best;
}

}  // namespace gramshield
