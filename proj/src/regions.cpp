#include "gramshield/regions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gramshield/distance.hpp"

namespace gramshield {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

void recompute_centroid(StcRegion& r, const PoiCatalog& catalog,
                        int slot_minutes) {
  double lat = 0, lon = 0;
  for (int m : r.members) {
    lat += catalog.poi(m).lat;
    lon += catalog.poi(m).lon;
  }
  const double n = static_cast<double>(r.members.size());
  r.centroid_lat = lat / n;
  r.centroid_lon = lon / n;
  r.time_centroid_min = circular_mean_minute(r.time_slots, slot_minutes);
}

// Coarse block id of a fine cell when the side x side grid is viewed at
// `coarse` x `coarse` resolution.
int coarse_block(int cell, int side, int coarse) {
  const int x = cell % side;
  const int y = cell / side;
  const int bx = x * coarse / side;
  const int by = y * coarse / side;
  return by * coarse + bx;
}

int circular_slot_gap(int a, int b, int n) {
  int diff = std::abs(a - b);
  return std::min(diff, n - diff);
}

}  // namespace

bool StcRegion::covers_slot(int slot) const {
  return std::find(time_slots.begin(), time_slots.end(), slot) !=
         time_slots.end();
}

std::vector<MergeDim> parse_merge_order(const std::string& text) {
  std::vector<MergeDim> order;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    std::string tok = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (tok == "space")
      order.push_back(MergeDim::Space);
    else if (tok == "time")
      order.push_back(MergeDim::Time);
    else if (tok == "category")
      order.push_back(MergeDim::Category);
    else if (!tok.empty())
      throw std::invalid_argument("unknown merge dimension '" + tok + "'");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return order;
}

std::string merge_order_to_string(const std::vector<MergeDim>& order) {
  std::string out;
  for (MergeDim d : order) {
    if (!out.empty()) out += ',';
    out += d == MergeDim::Space ? "space"
           : d == MergeDim::Time ? "time"
                                 : "category";
  }
  return out;
}

std::vector<int> circular_hull(std::vector<int> slots, int num_slots) {
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  const int k = static_cast<int>(slots.size());
  if (k <= 1) return slots;
  if (k == num_slots) {
    std::vector<int> all(num_slots);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  // the hull is the complement of the widest empty arc between occupants
  int best_gap = -1, best_at = 0;
  for (int i = 0; i < k; ++i) {
    const int cur = slots[i];
    const int next = slots[(i + 1) % k];
    const int gap = (next - cur + num_slots) % num_slots;
    if (gap > best_gap) {
      best_gap = gap;
      best_at = i;
    }
  }
  const int start = slots[(best_at + 1) % k];
  const int end = slots[best_at];  // inclusive, walking forward from start
  std::vector<int> hull;
  for (int s = start; ; s = (s + 1) % num_slots) {
    hull.push_back(s);
    if (s == end) break;
  }
  return hull;
}

double circular_mean_minute(const std::vector<int>& slots, int slot_minutes) {
  double sx = 0, sy = 0;
  for (int s : slots) {
    const double mid = (s + 0.5) * slot_minutes;
    const double ang = 2.0 * kPi * mid / 1440.0;
    sx += std::cos(ang);
    sy += std::sin(ang);
  }
  if (std::hypot(sx, sy) < 1e-9)
    return (slots.front() + 0.5) * slot_minutes;  // antipodal degenerate case
  double ang = std::atan2(sy, sx);
  if (ang < 0) ang += 2.0 * kPi;
  return ang * 1440.0 / (2.0 * kPi);
}

int RegionSet::region_for(int cell, int slot, int leaf) const {
  auto it = projection_.find(projection_key(cell, slot, leaf));
  return it == projection_.end() ? -1 : it->second;
}

std::uint64_t RegionSet::projection_key(int cell, int slot, int leaf) const {
  return (static_cast<std::uint64_t>(cell) * num_slots() +
          static_cast<std::uint64_t>(slot)) *
             static_cast<std::uint64_t>(num_nodes_) +
         static_cast<std::uint64_t>(leaf);
}

void RegionSet::set_projection(std::unordered_map<std::uint64_t, int> proj,
                               int num_nodes) {
  projection_ = std::move(proj);
  num_nodes_ = num_nodes;
}

RegionSet build_regions(const PoiCatalog& catalog, int grid_side,
                        int slot_minutes) {
  if (grid_side < 1) throw std::invalid_argument("grid side must be >= 1");
  if (slot_minutes <= 0 || 1440 % slot_minutes != 0)
    throw std::invalid_argument("slot minutes must divide 1440");

  RegionSet set;
  set.grid_side = grid_side;
  set.slot_minutes = slot_minutes;
  const int num_slots = set.num_slots();

  // ordered so region ids are deterministic
  std::map<std::tuple<int, int, int>, std::vector<int>> groups;
  for (int p = 0; p < catalog.size(); ++p) {
    const Poi& poi = catalog.poi(p);
    const int cell = catalog.grid_cell_of(p, grid_side);
    for (int slot = 0; slot < num_slots; ++slot) {
      if (poi.hours.overlaps(slot * slot_minutes, (slot + 1) * slot_minutes))
        groups[{cell, slot, poi.leaf_category()}].push_back(p);
    }
  }

  std::unordered_map<std::uint64_t, int> projection;
  set.set_projection({}, catalog.hierarchy().size());
  for (auto& [key, members] : groups) {
    StcRegion r;
    r.id = set.size();
    r.space_cells = {std::get<0>(key)};
    r.time_slots = {std::get<1>(key)};
    r.category_nodes = {std::get<2>(key)};
    r.members = std::move(members);
    std::sort(r.members.begin(), r.members.end());
    recompute_centroid(r, catalog, slot_minutes);
    projection[set.projection_key(std::get<0>(key), std::get<1>(key),
                                  std::get<2>(key))] = r.id;
    set.regions.push_back(std::move(r));
  }
  set.set_projection(std::move(projection), catalog.hierarchy().size());
  return set;
}

namespace {

struct MergeState {
  std::vector<StcRegion> regions;  // indexed by original id
  std::vector<bool> alive;
  std::vector<int> uf;  // union-find over original ids

  int root(int i) {
    while (uf[i] != i) {
      uf[i] = uf[uf[i]];
      i = uf[i];
    }
    return i;
  }
};

bool space_eligible(const StcRegion& a, const StcRegion& b, int side,
                    int coarse) {
  for (int ca : a.space_cells)
    for (int cb : b.space_cells)
      if (ca != cb && coarse_block(ca, side, coarse) ==
                          coarse_block(cb, side, coarse))
        return true;
  return false;
}

bool time_eligible(const StcRegion& a, const StcRegion& b, int num_slots) {
  if (a.time_slots == b.time_slots) return false;
  for (int sa : a.time_slots)
    for (int sb : b.time_slots)
      if (circular_slot_gap(sa, sb, num_slots) <= 1) return true;
  return false;
}

bool category_eligible(const CategoryHierarchy& h, const StcRegion& a,
                       const StcRegion& b) {
  if (a.category_nodes == b.category_nodes) return false;
  for (int na : a.category_nodes)
    for (int nb : b.category_nodes)
      if (h.common_ancestor(na, nb) >= 0) return true;
  return false;
}

int lca_of_all(const CategoryHierarchy& h, const std::vector<int>& nodes) {
  int anc = nodes.front();
  for (size_t i = 1; i < nodes.size() && anc >= 0; ++i)
    anc = h.common_ancestor(anc, nodes[i]);
  return anc;
}

void merge_pair(MergeState& st, const PoiCatalog& catalog, int slot_minutes,
                int keep, int gone, bool along_category) {
  StcRegion& a = st.regions[keep];
  StcRegion& b = st.regions[gone];
  a.space_cells = sorted_union(a.space_cells, b.space_cells);
  a.members = sorted_union(a.members, b.members);
  std::vector<int> slots = a.time_slots;
  slots.insert(slots.end(), b.time_slots.begin(), b.time_slots.end());
  a.time_slots = circular_hull(std::move(slots), 1440 / slot_minutes);
  std::vector<int> cats = sorted_union(a.category_nodes, b.category_nodes);
  if (along_category) {
    const int anc = lca_of_all(catalog.hierarchy(), cats);
    a.category_nodes = {anc};
  } else {
    a.category_nodes = std::move(cats);
  }
  recompute_centroid(a, catalog, slot_minutes);
  st.alive[gone] = false;
  st.uf[st.root(gone)] = st.root(keep);
}

// One greedy merge loop under a fixed eligibility predicate. Regions that
// found no partner are parked as exhausted and revisited only when a merge
// produces a region they are eligible against, which keeps the whole pass
// near O(R^2) instead of O(R^3).
template <typename Eligible>
void merge_loop(MergeState& st, const PoiCatalog& catalog,
                const DistanceParams& params, int kappa, int slot_minutes,
                bool along_category, Eligible&& eligible) {
  const int n = static_cast<int>(st.regions.size());
  std::vector<bool> exhausted(n, false);
  while (true) {
    int pick = -1, partner = -1;
    for (int i = 0; i < n; ++i) {
      if (!st.alive[i] || exhausted[i] ||
          static_cast<int>(st.regions[i].members.size()) >= kappa)
        continue;
      double best_d = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i || !st.alive[j]) continue;
        if (!eligible(st.regions[i], st.regions[j])) continue;
        const double d = region_distance(catalog.hierarchy(), st.regions[i],
                                         st.regions[j], params);
        if (partner < 0 || d < best_d || (d == best_d && j < partner)) {
          best_d = d;
          partner = j;
          pick = i;
        }
      }
      if (pick >= 0) break;
      exhausted[i] = true;
    }
    if (pick < 0) break;
    const int keep = std::min(pick, partner);
    const int gone = std::max(pick, partner);
    merge_pair(st, catalog, slot_minutes, keep, gone, along_category);
    exhausted[keep] = false;
    for (int x = 0; x < n; ++x)
      if (x != keep && st.alive[x] && exhausted[x] &&
          eligible(st.regions[x], st.regions[keep]))
        exhausted[x] = false;
  }
}

}  // namespace

RegionSet merge_regions(const RegionSet& in, const PoiCatalog& catalog,
                        int kappa, const std::vector<MergeDim>& order) {
  MergeState st;
  st.regions = in.regions;
  st.alive.assign(st.regions.size(), true);
  st.uf.resize(st.regions.size());
  std::iota(st.uf.begin(), st.uf.end(), 0);

  const DistanceParams params;  // nearness metric for partner selection
  const int num_slots = in.num_slots();

  for (MergeDim dim : order) {
    switch (dim) {
      case MergeDim::Space:
        for (int coarse : {2, 1}) {
          if (coarse >= in.grid_side) continue;
          merge_loop(st, catalog, params, kappa, in.slot_minutes, false,
                     [&](const StcRegion& a, const StcRegion& b) {
                       return space_eligible(a, b, in.grid_side, coarse);
                     });
        }
        break;
      case MergeDim::Time:
        merge_loop(st, catalog, params, kappa, in.slot_minutes, false,
                   [&](const StcRegion& a, const StcRegion& b) {
                     return time_eligible(a, b, num_slots);
                   });
        break;
      case MergeDim::Category:
        merge_loop(st, catalog, params, kappa, in.slot_minutes, true,
                   [&](const StcRegion& a, const StcRegion& b) {
                     return category_eligible(catalog.hierarchy(), a, b);
                   });
        break;
    }
  }

  RegionSet out;
  out.grid_side = in.grid_side;
  out.slot_minutes = in.slot_minutes;
  std::vector<int> new_id(st.regions.size(), -1);
  for (size_t i = 0; i < st.regions.size(); ++i) {
    if (!st.alive[i]) continue;
    StcRegion r = st.regions[i];
    r.id = out.size();
    new_id[i] = r.id;
    out.regions.push_back(std::move(r));
  }
  std::unordered_map<std::uint64_t, int> projection;
  for (const auto& [key, old_id] : in.projection())
    projection[key] = new_id[st.root(old_id)];
  out.set_projection(std::move(projection), catalog.hierarchy().size());
  return out;
}

bool region_reachable(const PoiCatalog& catalog, const StcRegion& a,
                      const StcRegion& b, double speed_kmh, double gap_min) {
  const double theta = threshold_theta_km(speed_kmh, gap_min);
  for (int pa : a.members)
    for (int pb : b.members)
      if (catalog.distance_km(pa, pb) <= theta) return true;
  return false;
}

}  // namespace gramshield
