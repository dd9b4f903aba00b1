#include "gramshield/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gramshield {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double region_error(int region, int index, const PerturbRecord& record,
                    const DistanceMatrix& dist) {
  double sum = 0;
  for (const PerturbEntry& e : record.entries)
    if (e.first <= index && index <= e.last)
      sum += dist(region, e.gram[index - e.first]);
  return sum;
}

double bigram_error(int index, int region_a, int region_b,
                    const PerturbRecord& record,
                    const DistanceMatrix& dist) {
  return region_error(region_a, index, record, dist) +
         region_error(region_b, index + 1, record, dist);
}

ReconstructionInstance::ReconstructionInstance(
    const PerturbRecord& record, std::vector<int> candidate_regions,
    std::vector<std::pair<int, int>> candidate_bigrams,
    const DistanceMatrix& dist)
    : record_(&record),
      regions_(std::move(candidate_regions)),
      bigrams_(std::move(candidate_bigrams)) {
  std::sort(regions_.begin(), regions_.end());
  regions_.erase(std::unique(regions_.begin(), regions_.end()),
                 regions_.end());
  for (size_t s = 0; s < regions_.size(); ++s)
    slot_index_[regions_[s]] = static_cast<int>(s);
  const int len = record.trajectory_len;
  errors_.resize(static_cast<size_t>(len) * regions_.size());
  for (int i = 0; i < len; ++i)
    for (size_t s = 0; s < regions_.size(); ++s)
      errors_[static_cast<size_t>(i) * regions_.size() + s] =
          region_error(regions_[s], i, record, dist);
}

int ReconstructionInstance::slot_of(int region) const {
  auto it = slot_index_.find(region);
  return it == slot_index_.end() ? -1 : it->second;
}

double default_mbr_slack_km(const PerturbRecord& record,
                            const RegionSet& regions, double speed_kmh) {
  int lo = std::numeric_limits<int>::max(), hi = 0;
  for (const PerturbEntry& e : record.entries) {
    for (int rid : e.gram) {
      for (int slot : regions.region(rid).time_slots) {
        lo = std::min(lo, slot * regions.slot_minutes);
        hi = std::max(hi, (slot + 1) * regions.slot_minutes);
      }
    }
  }
  const double span_min = std::max(hi - lo, regions.slot_minutes);
  return speed_kmh * span_min / 60.0;
}

ReconstructionInstance mbr_prune(const PerturbRecord& record,
                                 const RegionSet& regions,
                                 const PoiCatalog& catalog,
                                 const NGramSet& bigrams,
                                 const DistanceMatrix& dist,
                                 double slack_km) {
  std::set<int> z_regions;
  for (const PerturbEntry& e : record.entries)
    z_regions.insert(e.gram.begin(), e.gram.end());

  std::vector<int> kept;
  if (!std::isfinite(slack_km)) {
    kept.resize(regions.size());
    for (int r = 0; r < regions.size(); ++r) kept[r] = r;
  } else {
    BoundingBox box;
    int env_lo = std::numeric_limits<int>::max(), env_hi = 0;
    for (int rid : z_regions) {
      const StcRegion& r = regions.region(rid);
      for (int m : r.members) box.extend(catalog.poi(m).lat, catalog.poi(m).lon);
      for (int slot : r.time_slots) {
        env_lo = std::min(env_lo, slot * regions.slot_minutes);
        env_hi = std::max(env_hi, (slot + 1) * regions.slot_minutes);
      }
    }
    env_lo -= 60;
    env_hi += 60;
    const BoundingBox grown = box.expanded_km(slack_km);

    const std::vector<int> pois = catalog.pois_in_box(grown);
    std::vector<bool> in_box(catalog.size(), false);
    for (int p : pois) in_box[p] = true;

    for (int r = 0; r < regions.size(); ++r) {
      const StcRegion& region = regions.region(r);
      if (z_regions.count(r)) {  // everything in Z must survive
        kept.push_back(r);
        continue;
      }
      const bool spatial_hit = std::any_of(
          region.members.begin(), region.members.end(),
          [&](int m) { return in_box[m]; });
      if (!spatial_hit) continue;
      const bool time_hit = std::any_of(
          region.time_slots.begin(), region.time_slots.end(), [&](int slot) {
            const int a = slot * regions.slot_minutes;
            const int b = (slot + 1) * regions.slot_minutes;
            return a <= env_hi && b > env_lo;
          });
      if (time_hit) kept.push_back(r);
    }
  }

  std::vector<bool> is_kept(regions.size(), false);
  for (int r : kept) is_kept[r] = true;
  std::vector<std::pair<int, int>> pairs;
  for (size_t g = 0; g < bigrams.size(); ++g) {
    auto w = bigrams.gram(g);
    if (is_kept[w[0]] && is_kept[w[1]]) pairs.emplace_back(w[0], w[1]);
  }
  return ReconstructionInstance(record, std::move(kept), std::move(pairs),
                                dist);
}

RegionPathResult solve_region_path(const ReconstructionInstance& instance) {
  const int len = instance.traj_len();
  const auto& cands = instance.candidate_regions();
  const int C = static_cast<int>(cands.size());
  if (C == 0) throw std::invalid_argument("no candidate regions");

  RegionPathResult result;
  if (len == 1) {
    int best = 0;
    for (int s = 1; s < C; ++s)
      if (instance.error_at(0, s) < instance.error_at(0, best)) best = s;
    result.path = {cands[best]};
    result.objective = instance.error_at(0, best);
    return result;
  }

  // adjacency as candidate-slot pairs
  std::vector<std::vector<int>> out_slots(C);
  for (const auto& [ra, rb] : instance.candidate_bigrams()) {
    const int sa = instance.slot_of(ra);
    const int sb = instance.slot_of(rb);
    if (sa >= 0 && sb >= 0) out_slots[sa].push_back(sb);
  }
  for (auto& v : out_slots) std::sort(v.begin(), v.end());

  // suffix costs: g[i][s] = cheapest completion from layer i at slot s,
  // where the i->i+1 edge through bigram (s,s') costs e(i,s) + e(i+1,s')
  std::vector<std::vector<double>> g(len, std::vector<double>(C, 0.0));
  for (int i = len - 2; i >= 0; --i) {
    for (int s = 0; s < C; ++s) {
      double best = kInf;
      for (int s2 : out_slots[s]) {
        if (i + 1 < len - 1 && g[i + 1][s2] == kInf) continue;
        const double cost = instance.error_at(i, s) +
                            instance.error_at(i + 1, s2) + g[i + 1][s2];
        if (cost < best) best = cost;
      }
      g[i][s] = best;
    }
  }

  double total = kInf;
  for (int s = 0; s < C; ++s) total = std::min(total, g[0][s]);

  if (total == kInf) {
    // disconnected bigram graph: degrade to independent per-index argmins
    result.fallback = true;
    result.path.resize(len);
    double obj = 0;
    for (int i = 0; i < len; ++i) {
      int best = 0;
      for (int s = 1; s < C; ++s)
        if (instance.error_at(i, s) < instance.error_at(i, best)) best = s;
      result.path[i] = cands[best];
      obj += instance.error_at(i, best);
    }
    result.objective = obj;
    return result;
  }

  // walk forward taking the smallest region id that still achieves the
  // exact suffix cost; this yields the lexicographically smallest optimum
  result.path.resize(len);
  int cur = -1;
  for (int s = 0; s < C; ++s) {
    if (g[0][s] == total) {
      cur = s;
      break;
    }
  }
  result.path[0] = cands[cur];
  for (int i = 0; i < len - 1; ++i) {
    const double need = g[i][cur];
    for (int s2 : out_slots[cur]) {
      if (i + 1 < len - 1 && g[i + 1][s2] == kInf) continue;
      const double cost = instance.error_at(i, cur) +
                          instance.error_at(i + 1, s2) + g[i + 1][s2];
      if (cost == need) {
        cur = s2;
        break;
      }
    }
    result.path[i + 1] = cands[cur];
  }
  result.objective = total;
  return result;
}

namespace {

// Smallest step gap making the link a->b reachable when departing at
// `depart_t`, re-checked with the validator's own predicate so rounding
// can never disagree with it.
int min_feasible_steps(const PoiCatalog& catalog, int poi_a, int poi_b,
                       const TimeAxis& axis, const SpeedProfile& speed,
                       int depart_t) {
  const double d = catalog.distance_km(poi_a, poi_b);
  const double kmh = speed.at_minute(axis.minute_of(depart_t));
  const double gap_needed_min = d * 60.0 / kmh;
  int steps = std::max(
      1, static_cast<int>(std::ceil(gap_needed_min / axis.step_minutes - 1e-9)));
  while (steps < axis.num_steps() &&
         !within_threshold(d, kmh,
                           static_cast<double>(steps) * axis.step_minutes))
    ++steps;
  return steps;
}

}  // namespace

bool time_smooth(std::vector<TrajPoint>& points, const PoiCatalog& catalog,
                 const TimeAxis& axis, const SpeedProfile& speed) {
  const int T = axis.num_steps();
  const int len = static_cast<int>(points.size());
  if (len == 0) return true;

  auto push_to_open_forward = [&](int idx) {
    while (points[idx].t < T &&
           !catalog.open_at(points[idx].poi, points[idx].t, axis))
      ++points[idx].t;
  };

  push_to_open_forward(0);
  bool overflow = points[0].t >= T;
  for (int i = 1; i < len && !overflow; ++i) {
    const int need = min_feasible_steps(catalog, points[i - 1].poi,
                                        points[i].poi, axis, speed,
                                        points[i - 1].t);
    points[i].t = std::max(points[i].t, points[i - 1].t + need);
    push_to_open_forward(i);
    overflow = points[i].t >= T;
  }
  if (!overflow) return true;

  // day boundary hit: rebuild from the back, giving every point the
  // latest open timestep its outgoing link allows
  points[len - 1].t = T - 1;
  while (points[len - 1].t >= 0 &&
         !catalog.open_at(points[len - 1].poi, points[len - 1].t, axis))
    --points[len - 1].t;
  if (points[len - 1].t < 0) return false;
  for (int i = len - 2; i >= 0; --i) {
    // latest open step whose outgoing link is feasible at the departure
    // speed; anything earlier only squeezes the remaining points, so this
    // greedy is complete
    int t = points[i + 1].t - 1;
    while (t >= 0) {
      if (catalog.open_at(points[i].poi, t, axis)) {
        const double gap_min =
            static_cast<double>(points[i + 1].t - t) * axis.step_minutes;
        const double kmh = speed.at_minute(axis.minute_of(t));
        if (catalog.reachable(points[i].poi, points[i + 1].poi, kmh, gap_min))
          break;
      }
      --t;
    }
    if (t < 0) return false;
    points[i].t = t;
  }
  Trajectory check;
  check.points = points;
  return !validate_trajectory(check, catalog, axis, speed).has_value();
}

std::optional<Trajectory> sample_poi_trajectory(
    const RegionTrajectory& path, const RegionSet& regions,
    const PoiCatalog& catalog, const TimeAxis& axis, const SpeedProfile& speed,
    long long gamma, RngStream& rng, PoiSampleStats* stats) {
  PoiSampleStats local;
  PoiSampleStats& st = stats ? *stats : local;
  const int len = static_cast<int>(path.size());
  if (len == 0) throw std::invalid_argument("empty region path");

  const int steps_per_slot = regions.slot_minutes / axis.step_minutes;
  std::vector<std::vector<TrajPoint>> pairs(len);
  for (int i = 0; i < len; ++i) {
    const StcRegion& region = regions.region(path[i]);
    for (int poi : region.members) {
      for (int slot : region.time_slots) {
        const int t0 = slot * steps_per_slot;
        for (int k = 0; k < steps_per_slot; ++k) {
          if (catalog.open_at(poi, t0 + k, axis))
            pairs[i].push_back(TrajPoint{poi, t0 + k});
        }
      }
    }
    if (pairs[i].empty())
      throw std::runtime_error("region " + std::to_string(path[i]) +
                               " has no open (POI, timestep) pair");
  }

  auto feasible = [&](const std::vector<TrajPoint>& pts) {
    for (int i = 1; i < len; ++i) {
      if (pts[i].t <= pts[i - 1].t) return false;
      const double gap_min =
          static_cast<double>(pts[i].t - pts[i - 1].t) * axis.step_minutes;
      const double kmh = speed.at_minute(axis.minute_of(pts[i - 1].t));
      if (!catalog.reachable(pts[i - 1].poi, pts[i].poi, kmh, gap_min))
        return false;
    }
    return true;
  };

  auto draw_random = [&]() {
    std::vector<TrajPoint> pts(len);
    for (int i = 0; i < len; ++i)
      pts[i] = pairs[i][rng.next_below(pairs[i].size())];
    return pts;
  };

  double combo_count = 1;
  for (const auto& p : pairs) combo_count *= static_cast<double>(p.size());

  std::vector<TrajPoint> chosen;
  bool found = false;
  if (combo_count <= static_cast<double>(kEnumerationLimit)) {
    // small domain: enumerate and draw uniformly over feasible combinations
    std::vector<size_t> odo(len, 0);
    std::vector<std::vector<TrajPoint>> feasible_set;
    std::vector<TrajPoint> pts(len);
    while (true) {
      for (int i = 0; i < len; ++i) pts[i] = pairs[i][odo[i]];
      if (feasible(pts)) feasible_set.push_back(pts);
      int i = len - 1;
      while (i >= 0 && ++odo[i] == pairs[i].size()) odo[i--] = 0;
      if (i < 0) break;
    }
    st.attempts += static_cast<long long>(combo_count);
    if (!feasible_set.empty()) {
      chosen = feasible_set[rng.next_below(feasible_set.size())];
      found = true;
    }
  } else {
    for (long long attempt = 0; attempt < gamma; ++attempt) {
      ++st.attempts;
      std::vector<TrajPoint> pts = draw_random();
      if (feasible(pts)) {
        chosen = std::move(pts);
        found = true;
        break;
      }
    }
  }

  if (!found) {
    // the region sequence admits no feasible draw: smooth a random one
    ++st.smoothing_invoked;
    chosen = draw_random();
    if (!time_smooth(chosen, catalog, axis, speed)) {
      st.dropped = true;
      return std::nullopt;
    }
    for (int i = 0; i < len; ++i) {
      const int slot = axis.minute_of(chosen[i].t) / regions.slot_minutes;
      if (!regions.region(path[i]).covers_slot(slot))
        ++st.region_changed_points;
    }
  }

  Trajectory out;
  out.points = std::move(chosen);
  return out;
}

}  // namespace gramshield
