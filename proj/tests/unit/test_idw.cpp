#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "idw/idw.hpp"

using namespace sfwi;
using namespace sfwi::idw;

namespace {

// A point `km` east of (0, 0) along the equator.
GeoPoint east_km(double km, double radius = kDefaultEarthRadiusKm) { return {0.0, km / radius * 180.0 / std::numbers::pi}; }

// Brute-force weighted mean with explicit distances.
double weighted_mean(const std::vector<double>& d, const std::vector<double>& v, double p) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    num += v[i] / std::pow(d[i], p);
    den += 1 / std::pow(d[i], p);
  }
  return num / den;
}

}  // namespace

TEST_CASE("great_circle_km") {
  CHECK(great_circle_km({0, 0}, {0, 1}) == doctest::Approx(111.24).epsilon(1e-3));
  CHECK(great_circle_km({0, 0}, {0, 1}) == doctest::Approx(kDefaultEarthRadiusKm * std::numbers::pi / 180).epsilon(1e-12));
  CHECK(great_circle_km({-28.2, 153.3}, {-28.2, 153.3}) == 0.0);
  CHECK(great_circle_km({10, 20}, {-30, 40}) == doctest::Approx(great_circle_km({-30, 40}, {10, 20})));
  CHECK(great_circle_km({0, 0}, {0, 180}) == doctest::Approx(kDefaultEarthRadiusKm * std::numbers::pi));
}

TEST_CASE("near-coincident pairs never produce NaN") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lat(-89.9, 89.9), lon(-179.9, 179.9), tiny(-1e-9, 1e-9);
  for (int i = 0; i < 100000; ++i) {
    GeoPoint a{lat(rng), lon(rng)};
    GeoPoint b{a.lat_deg + tiny(rng), a.lon_deg + tiny(rng)};
    double d = great_circle_km(a, b);
    REQUIRE(std::isfinite(d));
    CHECK(d >= 0.0);
  }
}

TEST_CASE("idw_estimate: the three-sample case") {
  const double expect = 16.875 / 1.3125;
  CHECK(expect == doctest::Approx(12.857).epsilon(1e-4));
  CHECK(weighted_mean({1, 2, 4}, {10, 20, 30}, 2) == doctest::Approx(expect).epsilon(1e-15));
  std::vector<Sample> s{{east_km(1), 10}, {east_km(2), 20}, {east_km(4), 30}};
  CHECK(idw_estimate(s, {0, 0}) == doctest::Approx(expect).epsilon(1e-6));
  // The same ratios at a scale where acos keeps full precision.
  std::vector<Sample> far{{east_km(100), 10}, {east_km(200), 20}, {east_km(400), 30}};
  CHECK(idw_estimate(far, {0, 0}) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("idw_estimate: equidistant samples give the mean") {
  std::vector<Sample> s{{{0, 1}, 3}, {{0, -1}, 9}};
  CHECK(idw_estimate(s, {0, 0}) == doctest::Approx(6.0).epsilon(1e-12));
  std::vector<Sample> four{{{1, 0}, 1}, {{-1, 0}, 2}, {{0, 1}, 3}, {{0, -1}, 10}};
  CHECK(idw_estimate(four, {0, 0}) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("idw_estimate: single sample and snapping") {
  std::vector<Sample> one{{{-28, 153}, 7.5}};
  CHECK(idw_estimate(one, {-27, 150}) == 7.5);
  std::vector<Sample> two{{{-28, 153}, 2}, {{-29, 152}, 8}};
  CHECK(idw_estimate(two, {-28, 153}) == 2.0);
  CHECK_THROWS_AS(idw_estimate(std::vector<Sample>{}, {0, 0}), Error);
}

TEST_CASE("idw_estimate: boundedness, power and scale invariance") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lat(-30, -26), lon(150, 154), val(1, 15);
  for (int i = 0; i < 500; ++i) {
    std::vector<Sample> s;
    int n = 1 + static_cast<int>(rng() % 6);
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k < n; ++k) {
      s.push_back({{lat(rng), lon(rng)}, val(rng)});
      lo = std::min(lo, s.back().value);
      hi = std::max(hi, s.back().value);
    }
    GeoPoint at{lat(rng), lon(rng)};
    double v = idw_estimate(s, at);
    CHECK(v >= lo);
    CHECK(v <= hi);
    IdwConfig bigger;
    bigger.earth_radius_km = 3 * kDefaultEarthRadiusKm;
    CHECK(idw_estimate(s, at, bigger) == doctest::Approx(v).epsilon(1e-9));
  }
  // Higher power pulls the estimate toward the nearest sample.
  std::vector<Sample> s{{east_km(100), 10}, {east_km(300), 30}};
  IdwConfig p1, p4;
  p1.power = 1;
  p4.power = 4;
  CHECK(idw_estimate(s, {0, 0}, p4) < idw_estimate(s, {0, 0}, p1));
  CHECK(idw_estimate(s, {0, 0}, p1) == doctest::Approx(weighted_mean({100, 300}, {10, 30}, 1)).epsilon(1e-9));
  IdwConfig bad;
  bad.power = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("raster_frame: a single node fills every cell") {
  std::vector<Sample> s{{{-28.1, 153.1}, 9}};
  BoundingBox box{-29, 152, -27, 154};
  auto g = raster_frame(s, Timestamp{0}, box, 4, 3, ClassBands{});
  CHECK(g.values.size() == 12);
  for (double v : g.values) CHECK(v == 9.0);
  for (auto c : g.classes) CHECK(c.ordinal() == 9);
  auto one = raster_frame(s, Timestamp{0}, box, 1, 1, ClassBands{});
  CHECK(one.cell_center(0, 0) == GeoPoint{-28, 153});
  CHECK(one.values == std::vector<double>{9.0});
}

TEST_CASE("raster_frame: two nodes on a 3x3 grid") {
  BoundingBox box{-1.5, -1.5, 1.5, 1.5};
  // Nodes on the centres of the west and east cells of the middle row.
  std::vector<Sample> s{{{0, -1}, 2}, {{0, 1}, 8}};
  auto g = raster_frame(s, Timestamp{0}, box, 3, 3, ClassBands{});
  auto at = [&](int ix, int iy) { return g.values[static_cast<std::size_t>(iy * 3 + ix)]; };
  CHECK(at(0, 1) == 2.0);
  CHECK(at(2, 1) == 8.0);
  CHECK(at(1, 1) == doctest::Approx(5.0).epsilon(1e-12));
  for (int iy = 0; iy < 3; ++iy) {
    CHECK(at(0, iy) + at(2, iy) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(at(0, iy) < at(1, iy));
    CHECK(at(1, iy) < at(2, iy));
  }
  CHECK(at(0, 0) == doctest::Approx(at(0, 2)).epsilon(1e-12));
  CHECK(g.classes[4].ordinal() == 5);
  CHECK(g.cell_center(0, 0) == GeoPoint{1, -1});  // row 0 is the northernmost
}

TEST_CASE("raster_frame: empty input is a gap, bad grids are rejected") {
  BoundingBox box{-1, -1, 1, 1};
  auto g = raster_frame({}, Timestamp{600}, box, 2, 2, ClassBands{});
  CHECK(g.gap);
  CHECK(g.values.empty());
  std::vector<Sample> s{{{0, 0}, 3}};
  CHECK_THROWS_AS(raster_frame(s, Timestamp{0}, box, 0, 2, ClassBands{}), Error);
  CHECK_THROWS_AS(raster_frame(s, Timestamp{0}, BoundingBox{1, 0, -1, 1}, 2, 2, ClassBands{}), Error);
}

TEST_CASE("score mode bands the interpolated score") {
  std::vector<Sample> s{{{0, -1}, 10}, {{0, 1}, 30}};
  auto g = raster_frame(s, Timestamp{0}, {-1, -1.5, 1, 1.5}, 3, 1, ClassBands{}, {}, InterpolationMode::Score);
  CHECK(g.classes[0] == class_from_score(10, ClassBands{}));
  CHECK(g.classes[1] == class_from_score(g.values[1], ClassBands{}));
  CHECK(g.classes[2] == class_from_score(30, ClassBands{}));
}

TEST_CASE("class_from_ordinal_value rounds and clamps") {
  CHECK(class_from_ordinal_value(4.49).ordinal() == 4);
  CHECK(class_from_ordinal_value(4.5).ordinal() == 5);
  CHECK(class_from_ordinal_value(0.2).ordinal() == 1);
  CHECK(class_from_ordinal_value(17).ordinal() == 15);
}
