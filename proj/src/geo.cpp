#include "gramshield/geo.hpp"

#include <algorithm>
#include <cmath>

namespace gramshield {
namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
// km per degree of latitude (2*pi*R / 360)
constexpr double kKmPerDegLat = kEarthRadiusKm * kDegToRad;
}  // namespace

double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b) {
  const double phi_a = lat_a * kDegToRad;
  const double phi_b = lat_b * kDegToRad;
  const double dphi = (lat_b - lat_a) * kDegToRad;
  const double dlam = (lon_b - lon_a) * kDegToRad;
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlam / 2);
  const double h = s1 * s1 + std::cos(phi_a) * std::cos(phi_b) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double threshold_theta_km(double speed_kmh, double gap_min) {
  if (speed_kmh <= 0) throw std::invalid_argument("speed must be positive");
  if (gap_min <= 0) throw std::invalid_argument("time gap must be positive");
  return speed_kmh * gap_min / 60.0;
}

void BoundingBox::extend(double lat, double lon) {
  if (empty) {
    min_lat = max_lat = lat;
    min_lon = max_lon = lon;
    empty = false;
    return;
  }
  min_lat = std::min(min_lat, lat);
  max_lat = std::max(max_lat, lat);
  min_lon = std::min(min_lon, lon);
  max_lon = std::max(max_lon, lon);
}

double BoundingBox::diagonal_km() const {
  if (empty) return 0.0;
  return std::max(haversine_km(min_lat, min_lon, max_lat, max_lon),
                  haversine_km(min_lat, max_lon, max_lat, min_lon));
}

bool BoundingBox::contains(double lat, double lon) const {
  if (empty) return false;
  return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
}

BoundingBox BoundingBox::expanded_km(double km) const {
  if (empty || km <= 0) return *this;
  BoundingBox out = *this;
  if (!std::isfinite(km)) {
    out.min_lat = -90;
    out.max_lat = 90;
    out.min_lon = -180;
    out.max_lon = 180;
    return out;
  }
  const double dlat = km / kKmPerDegLat;
  const double widest_lat =
      std::min(89.9, std::max(std::abs(min_lat), std::abs(max_lat)));
  const double coslat = std::max(0.01, std::cos(widest_lat * kDegToRad));
  const double dlon = km / (kKmPerDegLat * coslat);
  out.min_lat = std::max(-90.0, min_lat - dlat);
  out.max_lat = std::min(90.0, max_lat + dlat);
  out.min_lon = std::max(-180.0, min_lon - dlon);
  out.max_lon = std::min(180.0, max_lon + dlon);
  return out;
}

}  // namespace gramshield
