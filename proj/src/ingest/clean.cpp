#include "ingest/clean.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "core/error.hpp"
#include "idw/idw.hpp"

namespace sfwi::ingest {

void CleanConfig::validate() const {
  for (const auto& r : physical_range)
    if (!(r.min < r.max)) throw Error(ErrorCode::InvalidArgument, "physical range needs min < max");
  if (neighbor_count < 1) throw Error(ErrorCode::InvalidArgument, "neighbor count must be >= 1");
  for (double t : residual_threshold)
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual thresholds must be > 0");
}

const char* to_string(OutlierReason r) {
  return r == OutlierReason::Range ? "range" : "neighbor_residual";
}

namespace {

double median(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Other nodes ordered by distance, ties by id.
std::map<std::string, std::vector<std::string>> neighbor_order(const NodeRegistry& nodes) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [id, p] : nodes.nodes()) {
    std::vector<std::pair<double, std::string>> d;
    for (const auto& [other, q] : nodes.nodes())
      if (other != id) d.emplace_back(idw::great_circle_km(p, q), other);
    std::sort(d.begin(), d.end());
    auto& list = out[id];
    for (auto& e : d) list.push_back(std::move(e.second));
  }
  return out;
}

}  // namespace

CleanResult clean_stream(const std::vector<Observation>& obs, const NodeRegistry& nodes, const CleanConfig& cfg) {
  cfg.validate();
  for (const auto& o : obs)
    if (!nodes.contains(o.node_id)) throw Error(ErrorCode::NotFound, "unknown node " + o.node_id, "node");

  std::vector<char> removed(obs.size(), 0);
  std::vector<std::pair<std::size_t, OutlierReason>> flagged;

  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& r = cfg.range(obs[i].property);
    if (obs[i].value < r.min || obs[i].value > r.max) {
      removed[i] = 1;
      flagged.emplace_back(i, OutlierReason::Range);
    }
  }

  const auto order = neighbor_order(nodes);
  // (property, slot) -> indices of readings in that slot
  std::map<std::pair<int, std::int64_t>, std::vector<std::size_t>> slots;
  for (std::size_t i = 0; i < obs.size(); ++i)
    slots[{static_cast<int>(obs[i].property), slot_floor(obs[i].time).seconds}].push_back(i);

  const std::size_t k = cfg.neighbor_count;
  for (const auto& [key, members] : slots) {
    const double threshold = cfg.residual_threshold[key.first];
    bool changed = true;
    while (changed) {
      changed = false;
      // first surviving reading per node in this slot
      std::unordered_map<std::string, double> by_node;
      for (std::size_t i : members)
        if (!removed[i]) by_node.try_emplace(obs[i].node_id, obs[i].value);
      if (by_node.size() <= k) break;

      std::vector<std::size_t> hits;
      std::vector<double> vals;
      for (std::size_t i : members) {
        if (removed[i]) continue;
        vals.clear();
        for (const auto& other : order.at(obs[i].node_id)) {
          auto it = by_node.find(other);
          if (it == by_node.end()) continue;
          vals.push_back(it->second);
          if (vals.size() == k) break;
        }
        if (vals.size() < k) continue;
        if (std::abs(obs[i].value - median(vals)) > threshold) hits.push_back(i);
      }
      for (std::size_t i : hits) {
        removed[i] = 1;
        flagged.emplace_back(i, OutlierReason::NeighborResidual);
        changed = true;
      }
    }
  }

  CleanResult result;
  std::sort(flagged.begin(), flagged.end());
  for (const auto& [i, reason] : flagged) {
    result.report.outliers.push_back({obs[i], reason});
    (reason == OutlierReason::Range ? result.report.range_count : result.report.neighbor_count)++;
  }
  if (cfg.policy == OutlierPolicy::Flag) {
    result.clean = obs;
  } else {
    result.clean.reserve(obs.size() - flagged.size());
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (!removed[i]) result.clean.push_back(obs[i]);
  }
  return result;
}

std::string outlier_report_csv(const OutlierReport& report, UtcOffset offset) {
  std::string out;
  for (const auto& o : report.outliers) {
    const auto& ob = o.observation;
    out += format_local_datetime(ob.time, offset);
    out += ", ";
    out += property_name(ob.property);
    out += ", " + ob.sensor_id + ", " + ob.node_id + ", " + format_decimal(ob.value) + ", " + to_string(o.reason) + "\n";
  }
  return out;
}

}  // namespace sfwi::ingest
