#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sfwi {

enum class Major { Low = 0, Moderate, High, VeryHigh, Extreme };
enum class Sub { Min = 0, Mid, Max };

inline constexpr int kClassCount = 15;

// One of the 15 ordered fire-weather classes. Ordinal runs 1 (Min-Low) to 15 (Max-Extreme).
class FwiClass {
 public:
  constexpr FwiClass() = default;
  constexpr FwiClass(Major major, Sub sub) : major_(major), sub_(sub) {}

  static FwiClass from_ordinal(int ordinal);

  constexpr Major major() const noexcept { return major_; }
  constexpr Sub sub() const noexcept { return sub_; }
  constexpr int ordinal() const noexcept {
    return 3 * static_cast<int>(major_) + static_cast<int>(sub_) + 1;
  }

  friend constexpr bool operator==(FwiClass a, FwiClass b) noexcept { return a.ordinal() == b.ordinal(); }
  friend constexpr auto operator<=>(FwiClass a, FwiClass b) noexcept { return a.ordinal() <=> b.ordinal(); }

 private:
  Major major_ = Major::Low;
  Sub sub_ = Sub::Min;
};

// "low-", "low", "low+", ..., "very high-", ..., "extreme+".
std::string label(FwiClass c);
FwiClass parse_label(std::string_view text);

// Local name inside the fwi: namespace. Mid classes use the bare major name
// ("High"), the others are prefixed ("Min-High", "Max-High").
std::string class_local_name(FwiClass c);
std::optional<FwiClass> class_from_local_name(std::string_view name);

const char* major_name(Major m);

// Lower edges of the five majors plus the Extreme split points. The three
// Extreme sub-bands are [x0, x1), [x1, x2), [x2, +inf) with x0 == major_edges[4].
struct ClassBands {
  std::array<double, 5> major_edges{0.0, 6.0, 12.0, 25.0, 50.0};
  std::array<double, 3> extreme_sub_edges{50.0, 75.0, 100.0};

  void validate() const;
};

FwiClass class_from_score(double score, const ClassBands& bands);

// Representative score of a class: middle of its band (Max-Extreme uses its lower edge).
double class_mid_score(FwiClass c, const ClassBands& bands);

enum class PropertyKind { AirTemperature = 0, RelativeHumidity, WindSpeed };

inline constexpr std::array<PropertyKind, 3> kAllProperties{
    PropertyKind::AirTemperature, PropertyKind::RelativeHumidity, PropertyKind::WindSpeed};

// "air_temperature", "relative_humidity", "wind_speed".
std::string_view property_name(PropertyKind p);
PropertyKind parse_property(std::string_view name);
std::optional<PropertyKind> try_parse_property(std::string_view name);
// "°C", "%", "m/s".
std::string_view canonical_unit(PropertyKind p);

}  // namespace sfwi
