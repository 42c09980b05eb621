#include "ingest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "core/error.hpp"

namespace sfwi::ingest {

namespace {

// std distributions are implementation-defined; these keep the corpus
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal(double mean, double sd) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

double round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string sensor_id_for(const std::string& prefix, const std::string& node) {
  std::string suffix = node.starts_with("SN_") ? node.substr(3) : node;
  return prefix + "_" + suffix;
}

struct NodeOffsets {
  double t, h, w;
};

}  // namespace

SyntheticStream generate_synthetic(const NodeRegistry& nodes, const TimeRange& range, std::uint64_t seed,
                                   double fault_rate, UtcOffset offset) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidArgument, "synthetic generator needs at least one node");
  if (!range.valid()) throw Error(ErrorCode::InvalidArgument, "invalid time range");
  if (!(fault_rate >= 0.0 && fault_rate < 1.0))
    throw Error(ErrorCode::InvalidArgument, "fault rate must be in [0, 1)", "fault_rate");

  Rng rng(seed);
  std::map<std::string, NodeOffsets> node_offsets;
  for (const auto& [id, p] : nodes.nodes())
    node_offsets[id] = {rng.normal(0.0, 0.5), rng.normal(0.0, 2.0), rng.normal(0.0, 0.3)};

  std::map<std::int64_t, NodeOffsets> day_anomaly;
  auto anomaly_for = [&](std::int64_t local_day) -> const NodeOffsets& {
    auto it = day_anomaly.find(local_day);
    if (it == day_anomaly.end())
      it = day_anomaly.emplace(local_day, NodeOffsets{rng.normal(0.0, 3.0), rng.normal(0.0, 10.0), rng.normal(0.0, 1.2)}).first;
    return it->second;
  };

  SyntheticStream out;
  for (Timestamp t : slots_in(range)) {
    const std::int64_t local = t.seconds + static_cast<std::int64_t>(offset.minutes) * 60;
    const std::int64_t local_day = local >= 0 ? local / 86400 : (local - 86399) / 86400;
    const NodeOffsets day = anomaly_for(local_day);
    const double hour = local_second_of_day(t, offset) / 3600.0;
    const double diurnal = std::cos(2.0 * std::numbers::pi * (hour - 14.0) / 24.0);

    for (const auto& [node, off] : node_offsets) {
      double temp = std::clamp(24.0 + day.t + off.t + 7.0 * diurnal + rng.normal(0.0, 0.4), 0.5, 44.5);
      double hum = std::clamp(62.0 + day.h + off.h - 20.0 * diurnal + rng.normal(0.0, 1.5), 5.0, 100.0);
      double wind = std::clamp(4.0 + day.w + off.w + 2.5 * diurnal + rng.normal(0.0, 0.4), 0.0, 24.9);
      const std::array<std::pair<PropertyKind, double>, 3> readings{
          std::pair{PropertyKind::AirTemperature, temp}, std::pair{PropertyKind::RelativeHumidity, hum},
          std::pair{PropertyKind::WindSpeed, wind}};
      for (auto [prop, value] : readings) {
        bool fault = rng.uniform() < fault_rate;
        if (fault) {
          double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          double mag = 0.0;
          switch (prop) {
            case PropertyKind::AirTemperature: mag = 30.0 + 20.0 * rng.uniform(); break;
            case PropertyKind::RelativeHumidity: mag = 110.0 + 40.0 * rng.uniform(); break;
            case PropertyKind::WindSpeed: mag = 45.0 + 20.0 * rng.uniform(); sign = 1.0; break;
          }
          value += sign * mag;
        }
        const char* prefix = prop == PropertyKind::AirTemperature ? "AT" : prop == PropertyKind::RelativeHumidity ? "RH" : "WS";
        out.observations.push_back({t, prop, sensor_id_for(prefix, node), node, round1(value), std::string(canonical_unit(prop))});
        out.injected.push_back(fault ? 1 : 0);
      }
    }
  }
  return out;
}

std::string to_csv(const std::vector<Observation>& obs, UtcOffset offset) {
  std::string out;
  out.reserve(obs.size() * 56);
  for (const auto& o : obs) {
    out += format_observation(o, offset);
    out += '\n';
  }
  return out;
}

std::string generate_synthetic_stream(const NodeRegistry& nodes, const TimeRange& range, std::uint64_t seed,
                                      double fault_rate, UtcOffset offset) {
  return to_csv(generate_synthetic(nodes, range, seed, fault_rate, offset).observations, offset);
}

NodeRegistry default_node_registry(int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "node count must be >= 1");
  // Springbrook plateau, roughly 3 km x 3.5 km.
  constexpr double south = -28.245, north = -28.215, west = 153.250, east = 153.285;
  NodeRegistry reg;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  for (int i = 0; i < count; ++i) {
    int r = i / cols, c = i % cols;
    double lat = south + (north - south) * (r + 0.5) / rows;
    double lon = west + (east - west) * (c + 0.5) / cols;
    reg.add("SN_" + std::to_string(i + 1), {lat, lon});
  }
  return reg;
}

}  // namespace sfwi::ingest
