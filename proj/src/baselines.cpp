#include "gramshield/baselines.hpp"

#include <cmath>

namespace gramshield {

std::optional<MechanismKind> parse_mechanism(const std::string& name) {
  if (name == "ngram") return MechanismKind::NGram;
  if (name == "ngram-noh") return MechanismKind::NGramNoH;
  if (name == "phys-dist") return MechanismKind::PhysDist;
  if (name == "ind-reach") return MechanismKind::IndReach;
  if (name == "ind-noreach") return MechanismKind::IndNoReach;
  return std::nullopt;
}

const char* mechanism_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::NGram: return "ngram";
    case MechanismKind::NGramNoH: return "ngram-noh";
    case MechanismKind::PhysDist: return "phys-dist";
    case MechanismKind::IndReach: return "ind-reach";
    case MechanismKind::IndNoReach: return "ind-noreach";
  }
  return "?";
}

PerturbRecord perturb_phys_dist(const RegionTrajectory& traj,
                                const NGramFamily& grams,
                                const DistanceMatrix& dist,
                                const SensitivitySchedule& sens, double eps,
                                RngStream& rng) {
  if (!dist.params().space_only)
    throw std::invalid_argument(
        "perturb_phys_dist needs a space-only distance matrix");
  return perturb_trajectory(traj, grams, dist, sens, eps, rng);
}

NGramFamily build_poi_ngram_family(const PoiCatalog& catalog, int max_n,
                                   double speed_kmh, double min_gap_min,
                                   size_t cap) {
  const int P = catalog.size();
  NGramFamily fam;
  for (int n = 1; n <= max_n; ++n) {
    if (n >= 3 && std::pow(static_cast<double>(P), n) > static_cast<double>(cap))
      throw NGramCapExceeded("materializing POI W^" + std::to_string(n) +
                             " over " + std::to_string(P) +
                             " POIs exceeds the configured cap");
    std::vector<int> flat;
    if (n == 1) {
      for (int p = 0; p < P; ++p) flat.push_back(p);
    } else if (n == 2) {
      const double theta = threshold_theta_km(speed_kmh, min_gap_min);
      for (int a = 0; a < P; ++a)
        for (int b = 0; b < P; ++b)
          if (catalog.distance_km(a, b) <= theta) {
            flat.push_back(a);
            flat.push_back(b);
          }
    } else {
      // extend (n-1)-grams by every reachable successor
      const NGramSet& prev = fam.sets[n - 2];
      const double theta = threshold_theta_km(speed_kmh, min_gap_min);
      for (size_t g = 0; g < prev.size(); ++g) {
        auto w = prev.gram(g);
        for (int b = 0; b < P; ++b) {
          if (catalog.distance_km(w.back(), b) > theta) continue;
          flat.insert(flat.end(), w.begin(), w.end());
          flat.push_back(b);
        }
      }
    }
    fam.sets.emplace_back(n, std::move(flat));
  }
  return fam;
}

double split_budget_noh(double eps, int traj_len, int n) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  return eps / (2 * traj_len + n - 1);
}

NoHRecord perturb_ngram_noh(const Trajectory& traj,
                            const NGramFamily& poi_grams,
                            const DistanceMatrix& poi_dist,
                            const SensitivitySchedule& poi_sens,
                            const TimeAxis& axis, const DistanceParams& params,
                            double eps, RngStream& rng) {
  const int len = traj.length();
  if (len < 1) throw std::invalid_argument("empty trajectory");
  const int n = std::min(poi_grams.max_n(), len);
  const double eps_call = split_budget_noh(eps, len, n);

  RegionTrajectory poi_path(len);
  for (int i = 0; i < len; ++i) poi_path[i] = traj.points[i].poi;

  NoHRecord rec;
  rec.eps_per_call = eps_call;
  // POI dimension: same overlapping-gram schedule as the main mechanism,
  // but spending eps_call per call rather than eps / (|tau| + n - 1)
  rec.poi_record = perturb_trajectory(poi_path, poi_grams, poi_dist, poi_sens,
                                      eps_call * (len + n - 1), rng);

  // time dimension: one EM call per index over all timesteps
  const int T = axis.num_steps();
  std::vector<double> step_dist(T);
  rec.perturbed_steps.resize(len);
  for (int i = 0; i < len; ++i) {
    const double true_min = axis.minute_of(traj.points[i].t);
    for (int t = 0; t < T; ++t)
      step_dist[t] =
          time_distance_hours(true_min, axis.minute_of(t), params);
    const EmDistribution em =
        em_distribution(step_dist, eps_call, params.time_cap_hours);
    rec.perturbed_steps[i] = em_sample(em, rng);
  }
  return rec;
}

std::vector<TrajPoint> open_poi_steps(const PoiCatalog& catalog,
                                      const TimeAxis& axis) {
  std::vector<TrajPoint> out;
  for (int p = 0; p < catalog.size(); ++p)
    for (int t = 0; t < axis.num_steps(); ++t)
      if (catalog.open_at(p, t, axis)) out.push_back(TrajPoint{p, t});
  return out;
}

RegionPathResult solve_poi_path(const PerturbRecord& poi_record,
                                const PoiCatalog& catalog,
                                const NGramSet& poi_bigrams,
                                const DistanceMatrix& poi_dist,
                                double slack_km) {
  std::vector<bool> in_z(catalog.size(), false);
  BoundingBox box;
  for (const PerturbEntry& e : poi_record.entries) {
    for (int p : e.gram) {
      in_z[p] = true;
      box.extend(catalog.poi(p).lat, catalog.poi(p).lon);
    }
  }
  std::vector<int> kept;
  if (!std::isfinite(slack_km)) {
    kept.resize(catalog.size());
    for (int p = 0; p < catalog.size(); ++p) kept[p] = p;
  } else {
    const BoundingBox grown = box.expanded_km(slack_km);
    for (int p = 0; p < catalog.size(); ++p)
      if (in_z[p] || grown.contains(catalog.poi(p).lat, catalog.poi(p).lon))
        kept.push_back(p);
  }
  std::vector<bool> is_kept(catalog.size(), false);
  for (int p : kept) is_kept[p] = true;
  std::vector<std::pair<int, int>> pairs;
  for (size_t g = 0; g < poi_bigrams.size(); ++g) {
    auto w = poi_bigrams.gram(g);
    if (is_kept[w[0]] && is_kept[w[1]]) pairs.emplace_back(w[0], w[1]);
  }
  ReconstructionInstance instance(poi_record, std::move(kept),
                                  std::move(pairs), poi_dist);
  return solve_region_path(instance);
}

std::optional<Trajectory> perturb_independent(
    const Trajectory& traj, const PoiCatalog& catalog,
    const DistanceMatrix& poi_dist, const TimeAxis& axis,
    const DistanceParams& params, const SpeedProfile& speed, double eps,
    bool enforce_reach, RngStream& rng, IndependentStats* stats) {
  IndependentStats local;
  IndependentStats& st = stats ? *stats : local;
  const int len = traj.length();
  if (len < 1) throw std::invalid_argument("empty trajectory");
  const double eps_call = eps / len;

  const std::vector<TrajPoint> all_pairs = open_poi_steps(catalog, axis);

  auto pair_distance = [&](const TrajPoint& truth, const TrajPoint& cand) {
    const double ds = poi_dist(truth.poi, cand.poi);  // sqrt(d_s^2 + d_c^2)
    const double dt = time_distance_hours(axis.minute_of(truth.t),
                                          axis.minute_of(cand.t), params);
    return std::sqrt(ds * ds + dt * dt);
  };
  const double delta =
      std::sqrt(std::pow(poi_sensitivity_bound(catalog, params, 1), 2) +
                params.time_cap_hours * params.time_cap_hours);

  Trajectory out;
  out.user = traj.user;
  out.points.resize(len);
  std::vector<TrajPoint> restricted;
  std::vector<double> distances;
  for (int i = 0; i < len; ++i) {
    const std::vector<TrajPoint>* cands = &all_pairs;
    if (enforce_reach && i > 0) {
      restricted.clear();
      const TrajPoint prev = out.points[i - 1];
      const double kmh = speed.at_minute(axis.minute_of(prev.t));
      for (const TrajPoint& c : all_pairs) {
        if (c.t <= prev.t) continue;
        const double gap_min =
            static_cast<double>(c.t - prev.t) * axis.step_minutes;
        if (catalog.reachable(prev.poi, c.poi, kmh, gap_min))
          restricted.push_back(c);
      }
      if (restricted.empty())
        ++st.restricted_fallbacks;  // keep the full set for this step
      else
        cands = &restricted;
    }
    distances.resize(cands->size());
    for (size_t c = 0; c < cands->size(); ++c)
      distances[c] = pair_distance(traj.points[i], (*cands)[c]);
    const EmDistribution em = em_distribution(distances, eps_call, delta);
    out.points[i] = (*cands)[em_sample(em, rng)];
  }

  if (validate_trajectory(out, catalog, axis, speed)) {
    st.smoothed = true;
    if (!time_smooth(out.points, catalog, axis, speed)) {
      st.dropped = true;
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace gramshield
