#ifndef GRAMSHIELD_GEO_HPP
#define GRAMSHIELD_GEO_HPP

#include <stdexcept>

namespace gramshield {

// Mean Earth radius; fixed so results are identical across implementations.
inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle (Haversine) distance in km.
double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b);

// Maximum distance coverable in `gap_min` minutes at `speed_kmh`.
// Throws std::invalid_argument on non-positive inputs.
double threshold_theta_km(double speed_kmh, double gap_min);

inline bool within_threshold(double dist_km, double speed_kmh, double gap_min) {
  return dist_km <= threshold_theta_km(speed_kmh, gap_min);
}

struct BoundingBox {
  double min_lat = 0, max_lat = 0, min_lon = 0, max_lon = 0;
  bool empty = true;

  void extend(double lat, double lon);
  // Longest corner-to-corner Haversine span of the box.
  double diagonal_km() const;
  bool contains(double lat, double lon) const;
  // Grow the box by roughly `km` in every direction (degree approximation,
  // clamped at the poles).
  BoundingBox expanded_km(double km) const;
};

}  // namespace gramshield

#endif
