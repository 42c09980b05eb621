#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ingest/observation.hpp"

namespace sfwi::ingest {

struct PhysicalRange {
  double min = 0.0;
  double max = 0.0;
};

enum class OutlierPolicy { Drop, Flag };

// Indexed by PropertyKind.
struct CleanConfig {
  std::array<PhysicalRange, 3> physical_range{PhysicalRange{-10.0, 60.0}, PhysicalRange{0.0, 100.0},
                                              PhysicalRange{0.0, 75.0}};
  std::size_t neighbor_count = 3;
  std::array<double, 3> residual_threshold{5.0, 20.0, 8.0};
  OutlierPolicy policy = OutlierPolicy::Drop;

  const PhysicalRange& range(PropertyKind p) const { return physical_range[static_cast<int>(p)]; }
  double threshold(PropertyKind p) const { return residual_threshold[static_cast<int>(p)]; }
  void validate() const;
};

enum class OutlierReason { Range, NeighborResidual };

const char* to_string(OutlierReason r);

struct Outlier {
  Observation observation;
  OutlierReason reason = OutlierReason::Range;
};

struct OutlierReport {
  std::vector<Outlier> outliers;
  std::size_t range_count = 0;
  std::size_t neighbor_count = 0;

  std::size_t size() const { return outliers.size(); }
  bool empty() const { return outliers.empty(); }
};

struct CleanResult {
  std::vector<Observation> clean;
  OutlierReport report;
};

// Range test, then a neighbour-median residual test repeated until no further
// reading is removed. With OutlierPolicy::Flag nothing is removed from `clean`.
CleanResult clean_stream(const std::vector<Observation>& obs, const NodeRegistry& nodes, const CleanConfig& cfg);

// CSV lines: time, property, sensor, node, value, reason.
std::string outlier_report_csv(const OutlierReport& report, UtcOffset offset);

}  // namespace sfwi::ingest
