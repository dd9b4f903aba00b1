#ifndef GRAMSHIELD_DISTANCE_HPP
#define GRAMSHIELD_DISTANCE_HPP

#include <span>
#include <vector>

#include "gramshield/regions.hpp"

namespace gramshield {

// Knobs of the multi-attribute distance. Components are combined
// unweighted in native units (km, hours, category units) by default.
struct DistanceParams {
  double time_cap_hours = 12.0;
  double unrelated_cost = 10.0;
  double weight_space = 1.0;
  double weight_time = 1.0;
  double weight_category = 1.0;
  bool space_only = false;  // PhysDist: drop time and category terms
};

// Haversine between region centroids.
double region_space_km(const StcRegion& a, const StcRegion& b);

// Absolute difference of time centroids in hours, shorter circular arc,
// capped at time_cap_hours.
double time_distance_hours(double minute_a, double minute_b,
                           const DistanceParams& params);
double region_time_hours(const StcRegion& a, const StcRegion& b,
                         const DistanceParams& params);

// Category distance by deepest-common-ancestor level: same node 0,
// level-2 ancestor 10/3, level-1 ancestor 20/3, unrelated 10
// (scaled from unrelated_cost over a 3-level hierarchy).
double category_distance(const CategoryHierarchy& h, int a, int b,
                         const DistanceParams& params);
// Region categories may hold several nodes after merging; the distance
// between sets is the closest node pair.
double category_set_distance(const CategoryHierarchy& h,
                             const std::vector<int>& a,
                             const std::vector<int>& b,
                             const DistanceParams& params);

// Combined distance sqrt(d_s^2 + d_t^2 + d_c^2).
double region_distance(const CategoryHierarchy& h, const StcRegion& a,
                       const StcRegion& b, const DistanceParams& params);

// Dense symmetric pairwise cache; elements are region ids or POI ids
// depending on the builder.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(int n, const DistanceParams& params)
      : n_(n), d_(static_cast<size_t>(n) * n, 0.0), params_(params) {}

  double operator()(int a, int b) const {
    return d_[static_cast<size_t>(a) * n_ + b];
  }
  void set(int a, int b, double v) {
    d_[static_cast<size_t>(a) * n_ + b] = v;
    d_[static_cast<size_t>(b) * n_ + a] = v;
  }
  int size() const { return n_; }
  const DistanceParams& params() const { return params_; }

 private:
  int n_ = 0;
  std::vector<double> d_;
  DistanceParams params_;
};

// Pairwise region_distance over a RegionSet.
DistanceMatrix region_distance_matrix(const PoiCatalog& catalog,
                                      const RegionSet& regions,
                                      const DistanceParams& params);

// Pairwise POI distance without the time term: sqrt(d_s^2 + d_c^2) on
// leaf categories (d_s alone when params.space_only).
DistanceMatrix poi_distance_matrix(const PoiCatalog& catalog,
                                   const DistanceParams& params);

// Elementwise sum of element distances between equal-length grams.
double gram_distance(const DistanceMatrix& d, std::span<const int> a,
                     std::span<const int> b);

// Analytic upper bound on max_{w,w'} d_w for length-n grams:
// n * sqrt(diag^2 + cap^2 + unrelated^2) with diag the catalog bounding-box
// diagonal. Never smaller than any realizable gram distance, so using it as
// the EM sensitivity only shrinks the exponent.
double sensitivity_bound(const PoiCatalog& catalog,
                         const DistanceParams& params, int n);
double sensitivity_bound_km(double diag_km, const DistanceParams& params,
                            int n);

// Same bound for the time-free POI distance of poi_distance_matrix.
double poi_sensitivity_bound(const PoiCatalog& catalog,
                             const DistanceParams& params, int n);

}  // namespace gramshield

#endif
