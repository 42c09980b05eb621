#pragma once

#include <vector>

#include "core/time.hpp"

namespace sfwi::infer {

// Sorts and merges overlapping or adjacent ranges; drops empty ones.
std::vector<TimeRange> coalesce(std::vector<TimeRange> ranges);

// Sorted, disjoint, non-adjacent set of ranges already inferred.
class CoverageIndex {
 public:
  CoverageIndex() = default;
  explicit CoverageIndex(std::vector<TimeRange> ranges) : ranges_(coalesce(std::move(ranges))) {}

  const std::vector<TimeRange>& ranges() const noexcept { return ranges_; }
  void add(const TimeRange& r);
  bool covers(const TimeRange& r) const;

 private:
  std::vector<TimeRange> ranges_;
};

// Minimal sorted sub-ranges of `req` not covered by `cov`.
std::vector<TimeRange> missing_ranges(const CoverageIndex& cov, const TimeRange& req);

}  // namespace sfwi::infer
