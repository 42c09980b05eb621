#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/fwi_class.hpp"
#include "core/geo.hpp"
#include "core/time.hpp"

namespace sfwi::idw {

inline constexpr double kDefaultEarthRadiusKm = 6373.8;

struct Sample {
  GeoPoint location;
  double value = 0.0;
};

struct IdwConfig {
  double power = 2.0;
  double earth_radius_km = kDefaultEarthRadiusKm;
  double snap_epsilon_km = 1e-6;

  void validate() const;
};

// Spherical law of cosines on a sphere of radius `radius_km`; the acos
// argument is clamped to [-1, 1].
double great_circle_km(const GeoPoint& a, const GeoPoint& b, double radius_km = kDefaultEarthRadiusKm);

// Normalised inverse-distance weighted mean. A sample closer than
// snap_epsilon_km to `at` is returned exactly.
double idw_estimate(std::span<const Sample> samples, const GeoPoint& at, const IdwConfig& cfg = {});

enum class InterpolationMode { Ordinal, Score };

struct RasterGrid {
  BoundingBox bbox;
  int nx = 1;
  int ny = 1;
  Timestamp timestamp;
  bool gap = false;               // no input at this timestamp
  std::vector<double> values;     // row-major, row 0 = northernmost
  std::vector<FwiClass> classes;  // same layout as values

  GeoPoint cell_center(int ix, int iy) const;
};

// Samples carry class ordinals (Ordinal mode) or fire-danger scores (Score
// mode). Ordinal mode rounds the interpolated ordinal to the nearest class;
// Score mode bands the interpolated score with `bands`.
RasterGrid raster_frame(std::span<const Sample> samples, Timestamp timestamp, const BoundingBox& bbox,
                        int nx, int ny, const ClassBands& bands, const IdwConfig& cfg = {},
                        InterpolationMode mode = InterpolationMode::Ordinal);

FwiClass class_from_ordinal_value(double value);

}  // namespace sfwi::idw
