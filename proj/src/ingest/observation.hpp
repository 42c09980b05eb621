#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/fwi_class.hpp"
#include "core/geo.hpp"
#include "core/time.hpp"

namespace sfwi::ingest {

struct Observation {
  Timestamp time;
  PropertyKind property = PropertyKind::AirTemperature;
  std::string sensor_id;
  std::string node_id;
  double value = 0.0;
  std::string unit;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Parses one six-field record: time, property, sensor, node, value, unit.
// The timestamp is local time at `offset`. Errors carry `line_no`.
Observation parse_observation_line(std::string_view line, UtcOffset offset, std::size_t line_no = 1);

// Parses a header-less CSV document; blank lines are skipped.
std::vector<Observation> parse_observation_csv(std::string_view text, UtcOffset offset);

// Canonical form: "YYYY-MM-DD HH:MM:SS, property, sensor, node, value, unit".
std::string format_observation(const Observation& obs, UtcOffset offset);

// Shortest decimal text that round-trips the double.
std::string format_decimal(double value);

class NodeRegistry {
 public:
  void add(const std::string& node_id, GeoPoint location);
  bool contains(const std::string& node_id) const { return nodes_.contains(node_id); }
  const GeoPoint& at(const std::string& node_id) const;
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::map<std::string, GeoPoint>& nodes() const { return nodes_; }

  friend bool operator==(const NodeRegistry&, const NodeRegistry&) = default;

 private:
  std::map<std::string, GeoPoint> nodes_;
};

// JSON: {"nodes":[{"id":"SN_1","lat":-28.23,"lon":153.27}, ...]}
NodeRegistry parse_node_registry_json(std::string_view text);
std::string node_registry_to_json(const NodeRegistry& registry);

}  // namespace sfwi::ingest
