#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ingest/observation.hpp"

namespace sfwi::ingest {

struct SyntheticStream {
  std::vector<Observation> observations;  // ordered by (time, node, property)
  std::vector<char> injected;             // 1 where a gross outlier was injected
};

// Diurnal weather over a 10-minute grid for every node and property, with
// per-node offsets, day-to-day anomalies and seeded noise. A `fault_rate`
// fraction of records is replaced by gross outliers. Deterministic per seed.
SyntheticStream generate_synthetic(const NodeRegistry& nodes, const TimeRange& range, std::uint64_t seed,
                                   double fault_rate, UtcOffset offset = {});

std::string generate_synthetic_stream(const NodeRegistry& nodes, const TimeRange& range, std::uint64_t seed,
                                      double fault_rate, UtcOffset offset = {});

std::string to_csv(const std::vector<Observation>& obs, UtcOffset offset);

// `count` nodes spread over the default study region box.
NodeRegistry default_node_registry(int count);

}  // namespace sfwi::ingest
