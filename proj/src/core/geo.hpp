#pragma once

#include <cmath>

#include "core/error.hpp"

namespace sfwi {

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  bool valid() const noexcept {
    return std::isfinite(lat_deg) && std::isfinite(lon_deg) && lat_deg >= -90.0 &&
           lat_deg <= 90.0 && lon_deg >= -180.0 && lon_deg <= 180.0;
  }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline GeoPoint make_geo_point(double lat_deg, double lon_deg) {
  GeoPoint p{lat_deg, lon_deg};
  if (!p.valid()) throw Error(ErrorCode::Domain, "coordinates out of range");
  return p;
}

// South/west/north/east bounding box in decimal degrees.
struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  bool valid() const noexcept {
    return GeoPoint{south, west}.valid() && GeoPoint{north, east}.valid() && south < north &&
           west < east;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace sfwi
