#include "core/fwi_class.hpp"

#include <cmath>

#include "core/error.hpp"

namespace sfwi {

namespace {

constexpr std::array<const char*, 5> kMajorLabels{"low", "moderate", "high", "very high", "extreme"};
constexpr std::array<const char*, 5> kMajorNames{"Low", "Moderate", "High", "VeryHigh", "Extreme"};

}  // namespace

FwiClass FwiClass::from_ordinal(int ordinal) {
  if (ordinal < 1 || ordinal > kClassCount) throw Error(ErrorCode::Domain, "class ordinal outside 1..15");
  return {static_cast<Major>((ordinal - 1) / 3), static_cast<Sub>((ordinal - 1) % 3)};
}

const char* major_name(Major m) { return kMajorNames[static_cast<int>(m)]; }

std::string label(FwiClass c) {
  std::string out = kMajorLabels[static_cast<int>(c.major())];
  if (c.sub() == Sub::Min) out += '-';
  if (c.sub() == Sub::Max) out += '+';
  return out;
}

FwiClass parse_label(std::string_view text) {
  Sub sub = Sub::Mid;
  if (!text.empty() && text.back() == '-') {
    sub = Sub::Min;
    text.remove_suffix(1);
  } else if (!text.empty() && text.back() == '+') {
    sub = Sub::Max;
    text.remove_suffix(1);
  }
  for (int i = 0; i < 5; ++i)
    if (text == kMajorLabels[i]) return {static_cast<Major>(i), sub};
  throw Error(ErrorCode::Parse, "unknown class label: " + std::string(text));
}

std::string class_local_name(FwiClass c) {
  std::string base = kMajorNames[static_cast<int>(c.major())];
  switch (c.sub()) {
    case Sub::Min: return "Min-" + base;
    case Sub::Max: return "Max-" + base;
    case Sub::Mid: break;
  }
  return base;
}

std::optional<FwiClass> class_from_local_name(std::string_view name) {
  Sub sub = Sub::Mid;
  if (name.starts_with("Min-")) {
    sub = Sub::Min;
    name.remove_prefix(4);
  } else if (name.starts_with("Mid-")) {
    name.remove_prefix(4);
  } else if (name.starts_with("Max-")) {
    sub = Sub::Max;
    name.remove_prefix(4);
  }
  for (int i = 0; i < 5; ++i)
    if (name == kMajorNames[i]) return FwiClass{static_cast<Major>(i), sub};
  return std::nullopt;
}

void ClassBands::validate() const {
  for (double e : major_edges)
    if (!std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "class band edges must be finite");
  for (double e : extreme_sub_edges)
    if (!std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "class band edges must be finite");
  for (std::size_t i = 1; i < major_edges.size(); ++i)
    if (!(major_edges[i - 1] < major_edges[i]))
      throw Error(ErrorCode::InvalidArgument, "major edges must be strictly increasing");
  if (extreme_sub_edges[0] != major_edges[4])
    throw Error(ErrorCode::InvalidArgument, "first Extreme sub-edge must equal the Extreme lower edge");
  if (!(extreme_sub_edges[0] < extreme_sub_edges[1] && extreme_sub_edges[1] < extreme_sub_edges[2]))
    throw Error(ErrorCode::InvalidArgument, "Extreme sub-edges must be strictly increasing");
}

FwiClass class_from_score(double score, const ClassBands& bands) {
  if (!std::isfinite(score)) throw Error(ErrorCode::Domain, "score must be finite");
  if (score < bands.major_edges[0]) throw Error(ErrorCode::Domain, "score below the lowest class edge");
  if (score >= bands.major_edges[4]) {
    Sub sub = score < bands.extreme_sub_edges[1]   ? Sub::Min
              : score < bands.extreme_sub_edges[2] ? Sub::Mid
                                                   : Sub::Max;
    return {Major::Extreme, sub};
  }
  int m = 0;
  while (score >= bands.major_edges[m + 1]) ++m;
  double lo = bands.major_edges[m];
  double width = bands.major_edges[m + 1] - lo;
  Sub sub = score < lo + width / 3.0 ? Sub::Min : score < lo + 2.0 * width / 3.0 ? Sub::Mid : Sub::Max;
  return {static_cast<Major>(m), sub};
}

double class_mid_score(FwiClass c, const ClassBands& bands) {
  int m = static_cast<int>(c.major());
  int s = static_cast<int>(c.sub());
  if (c.major() == Major::Extreme) {
    if (c.sub() == Sub::Max) return bands.extreme_sub_edges[2];
    return 0.5 * (bands.extreme_sub_edges[s] + bands.extreme_sub_edges[s + 1]);
  }
  double lo = bands.major_edges[m];
  double width = bands.major_edges[m + 1] - lo;
  return lo + width * (2.0 * s + 1.0) / 6.0;
}

std::string_view property_name(PropertyKind p) {
  switch (p) {
    case PropertyKind::AirTemperature: return "air_temperature";
    case PropertyKind::RelativeHumidity: return "relative_humidity";
    case PropertyKind::WindSpeed: return "wind_speed";
  }
  return "";
}

std::optional<PropertyKind> try_parse_property(std::string_view name) {
  for (PropertyKind p : kAllProperties)
    if (property_name(p) == name) return p;
  return std::nullopt;
}

PropertyKind parse_property(std::string_view name) {
  if (auto p = try_parse_property(name)) return *p;
  throw Error(ErrorCode::InvalidArgument, "unknown property: " + std::string(name), "property");
}

std::string_view canonical_unit(PropertyKind p) {
  switch (p) {
    case PropertyKind::AirTemperature: return "\xC2\xB0" "C";
    case PropertyKind::RelativeHumidity: return "%";
    case PropertyKind::WindSpeed: return "m/s";
  }
  return "";
}

}  // namespace sfwi
