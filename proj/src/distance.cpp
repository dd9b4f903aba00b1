#include "gramshield/distance.hpp"

#include <algorithm>
#include <cmath>

namespace gramshield {

double region_space_km(const StcRegion& a, const StcRegion& b) {
  return haversine_km(a.centroid_lat, a.centroid_lon, b.centroid_lat,
                      b.centroid_lon);
}

double time_distance_hours(double minute_a, double minute_b,
                           const DistanceParams& params) {
  double diff = std::abs(minute_a - minute_b) / 60.0;
  diff = std::min(diff, 24.0 - diff);
  return std::min(diff, params.time_cap_hours);
}

double region_time_hours(const StcRegion& a, const StcRegion& b,
                         const DistanceParams& params) {
  return time_distance_hours(a.time_centroid_min, b.time_centroid_min, params);
}

double category_distance(const CategoryHierarchy& h, int a, int b,
                         const DistanceParams& params) {
  if (a < 0 || b < 0 || a >= h.size() || b >= h.size())
    throw std::invalid_argument("unknown category node");
  if (a == b) return 0.0;
  const int anc = h.common_ancestor(a, b);
  const int depth = h.depth();
  if (anc < 0) return params.unrelated_cost;
  return params.unrelated_cost * static_cast<double>(depth - h.level(anc)) /
         depth;
}

double category_set_distance(const CategoryHierarchy& h,
                             const std::vector<int>& a,
                             const std::vector<int>& b,
                             const DistanceParams& params) {
  double best = params.unrelated_cost;
  for (int na : a)
    for (int nb : b) best = std::min(best, category_distance(h, na, nb, params));
  return best;
}

double region_distance(const CategoryHierarchy& h, const StcRegion& a,
                       const StcRegion& b, const DistanceParams& params) {
  const double ds = params.weight_space * region_space_km(a, b);
  if (params.space_only) return ds;
  const double dt = params.weight_time * region_time_hours(a, b, params);
  const double dc =
      params.weight_category *
      category_set_distance(h, a.category_nodes, b.category_nodes, params);
  return std::sqrt(ds * ds + dt * dt + dc * dc);
}

DistanceMatrix region_distance_matrix(const PoiCatalog& catalog,
                                      const RegionSet& regions,
                                      const DistanceParams& params) {
  DistanceMatrix m(regions.size(), params);
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j)
      m.set(i, j,
            region_distance(catalog.hierarchy(), regions.region(i),
                            regions.region(j), params));
  return m;
}

DistanceMatrix poi_distance_matrix(const PoiCatalog& catalog,
                                   const DistanceParams& params) {
  DistanceMatrix m(catalog.size(), params);
  for (int i = 0; i < m.size(); ++i) {
    for (int j = i + 1; j < m.size(); ++j) {
      const double ds = params.weight_space * catalog.distance_km(i, j);
      if (params.space_only) {
        m.set(i, j, ds);
        continue;
      }
      const double dc = params.weight_category *
                        category_distance(catalog.hierarchy(),
                                          catalog.poi(i).leaf_category(),
                                          catalog.poi(j).leaf_category(),
                                          params);
      m.set(i, j, std::sqrt(ds * ds + dc * dc));
    }
  }
  return m;
}

double gram_distance(const DistanceMatrix& d, std::span<const int> a,
                     std::span<const int> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("gram_distance: length mismatch");
  double sum = 0;
  for (size_t i = 0; i < a.size(); ++i) sum += d(a[i], b[i]);
  return sum;
}

double sensitivity_bound_km(double diag_km, const DistanceParams& params,
                            int n) {
  const double ds = params.weight_space * diag_km;
  double bound;
  if (params.space_only) {
    bound = ds;
  } else {
    const double dt = params.weight_time * params.time_cap_hours;
    const double dc = params.weight_category * params.unrelated_cost;
    bound = std::sqrt(ds * ds + dt * dt + dc * dc);
  }
  return std::max(n * bound, 1e-9);
}

double sensitivity_bound(const PoiCatalog& catalog,
                         const DistanceParams& params, int n) {
  return sensitivity_bound_km(catalog.bbox().diagonal_km(), params, n);
}

double poi_sensitivity_bound(const PoiCatalog& catalog,
                             const DistanceParams& params, int n) {
  const double ds = params.weight_space * catalog.bbox().diagonal_km();
  if (params.space_only) return std::max(n * ds, 1e-9);
  const double dc = params.weight_category * params.unrelated_cost;
  return std::max(n * std::sqrt(ds * ds + dc * dc), 1e-9);
}

}  // namespace gramshield
