#include "ingest/observation.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include "json.hpp"

#include "core/error.hpp"

namespace sfwi::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Error line_error(const std::string& what, std::size_t line_no, std::string field) {
  return Error::parse("line " + std::to_string(line_no) + ": " + what, line_no, 0, std::move(field));
}

}  // namespace

std::string format_decimal(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

Observation parse_observation_line(std::string_view line, UtcOffset offset, std::size_t line_no) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 6)
    throw line_error("expected 6 fields, got " + std::to_string(fields.size()), line_no, "record");

  Observation obs;
  try {
    obs.time = parse_local_datetime(fields[0], offset);
  } catch (const Error& e) {
    throw line_error(e.what(), line_no, "time");
  }
  auto prop = try_parse_property(fields[1]);
  if (!prop) throw line_error("unknown property '" + std::string(fields[1]) + "'", line_no, "property");
  obs.property = *prop;
  if (fields[2].empty()) throw line_error("empty sensor id", line_no, "sensor");
  if (fields[3].empty()) throw line_error("empty node id", line_no, "node");
  obs.sensor_id = fields[2];
  obs.node_id = fields[3];

  std::string_view v = fields[4];
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  auto res = std::from_chars(v.data(), v.data() + v.size(), obs.value);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(obs.value))
    throw line_error("unparsable value '" + std::string(fields[4]) + "'", line_no, "value");

  if (fields[5] != canonical_unit(obs.property))
    throw line_error("unit '" + std::string(fields[5]) + "' does not match " +
                         std::string(property_name(obs.property)),
                     line_no, "unit");
  obs.unit = fields[5];
  return obs;
}

std::vector<Observation> parse_observation_csv(std::string_view text, UtcOffset offset) {
  std::vector<Observation> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    if (!trim(line).empty()) out.push_back(parse_observation_line(line, offset, line_no));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::string format_observation(const Observation& obs, UtcOffset offset) {
  std::string out = format_local_datetime(obs.time, offset);
  out += ", ";
  out += property_name(obs.property);
  out += ", " + obs.sensor_id + ", " + obs.node_id + ", " + format_decimal(obs.value) + ", ";
  out += canonical_unit(obs.property);
  return out;
}

void NodeRegistry::add(const std::string& node_id, GeoPoint location) {
  if (node_id.empty()) throw Error(ErrorCode::InvalidArgument, "empty node id", "node");
  if (!location.valid()) throw Error(ErrorCode::Domain, "invalid coordinates for node " + node_id, "node");
  if (!nodes_.emplace(node_id, location).second)
    throw Error(ErrorCode::InvalidArgument, "duplicate node id " + node_id, "node");
}

const GeoPoint& NodeRegistry::at(const std::string& node_id) const {
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw Error(ErrorCode::NotFound, "unknown node " + node_id, "node");
  return it->second;
}

NodeRegistry parse_node_registry_json(std::string_view text) {
  NodeRegistry reg;
  try {
    auto doc = nlohmann::json::parse(text);
    for (const auto& n : doc.at("nodes"))
      reg.add(n.at("id").get<std::string>(), {n.at("lat").get<double>(), n.at("lon").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("node registry: ") + e.what());
  }
  return reg;
}

std::string node_registry_to_json(const NodeRegistry& registry) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, p] : registry.nodes()) nodes.push_back({{"id", id}, {"lat", p.lat_deg}, {"lon", p.lon_deg}});
  return nlohmann::json{{"nodes", nodes}}.dump(2) + "\n";
}

}  // namespace sfwi::ingest
