#include "idw/idw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace sfwi::idw {

namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void IdwConfig::validate() const {
  if (!(power > 0.0) || !std::isfinite(power)) throw Error(ErrorCode::InvalidArgument, "IDW power must be > 0", "power");
  if (!(earth_radius_km > 0.0) || !std::isfinite(earth_radius_km))
    throw Error(ErrorCode::InvalidArgument, "earth radius must be > 0", "earth_radius_km");
  if (!(snap_epsilon_km >= 0.0)) throw Error(ErrorCode::InvalidArgument, "snap epsilon must be >= 0");
}

double great_circle_km(const GeoPoint& a, const GeoPoint& b, double radius_km) {
  const double lat_a = to_radians(a.lat_deg);
  const double lat_b = to_radians(b.lat_deg);
  const double dlon = to_radians(a.lon_deg - b.lon_deg);
  // sin a sin b + cos a cos b cos dlon, rearranged so that coincident points
  // give exactly 1.
  double c = std::cos(lat_a - lat_b) - std::cos(lat_a) * std::cos(lat_b) * (1.0 - std::cos(dlon));
  c = std::clamp(c, -1.0, 1.0);
  return radius_km * std::acos(c);
}

double idw_estimate(std::span<const Sample> samples, const GeoPoint& at, const IdwConfig& cfg) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "IDW needs at least one sample");
  double num = 0.0;
  double den = 0.0;
  for (const Sample& s : samples) {
    double d = great_circle_km(s.location, at, cfg.earth_radius_km);
    if (d <= cfg.snap_epsilon_km) return s.value;
    double w = 1.0 / std::pow(d, cfg.power);
    num += w * s.value;
    den += w;
  }
  double v = num / den;
  // Rounding can push a convex combination a hair outside the sample range.
  auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                      [](const Sample& x, const Sample& y) { return x.value < y.value; });
  return std::clamp(v, lo->value, hi->value);
}

GeoPoint RasterGrid::cell_center(int ix, int iy) const {
  double dlat = (bbox.north - bbox.south) / ny;
  double dlon = (bbox.east - bbox.west) / nx;
  return {bbox.north - (iy + 0.5) * dlat, bbox.west + (ix + 0.5) * dlon};
}

FwiClass class_from_ordinal_value(double value) {
  int o = static_cast<int>(std::lround(value));
  return FwiClass::from_ordinal(std::clamp(o, 1, kClassCount));
}

RasterGrid raster_frame(std::span<const Sample> samples, Timestamp timestamp, const BoundingBox& bbox,
                        int nx, int ny, const ClassBands& bands, const IdwConfig& cfg,
                        InterpolationMode mode) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
  if (!bbox.valid()) throw Error(ErrorCode::InvalidArgument, "invalid bounding box", "bbox");
  cfg.validate();
  RasterGrid grid;
  grid.bbox = bbox;
  grid.nx = nx;
  grid.ny = ny;
  grid.timestamp = timestamp;
  if (samples.empty()) {
    grid.gap = true;
    return grid;
  }
  grid.values.reserve(static_cast<std::size_t>(nx) * ny);
  grid.classes.reserve(grid.values.capacity());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double v = idw_estimate(samples, grid.cell_center(ix, iy), cfg);
      grid.values.push_back(v);
      grid.classes.push_back(mode == InterpolationMode::Ordinal
                                 ? class_from_ordinal_value(v)
                                 : class_from_score(std::max(v, bands.major_edges[0]), bands));
    }
  }
  return grid;
}

}  // namespace sfwi::idw
