#include "infer/coverage.hpp"

#include <algorithm>

namespace sfwi::infer {

std::vector<TimeRange> coalesce(std::vector<TimeRange> ranges) {
  std::erase_if(ranges, [](const TimeRange& r) { return !r.valid(); });
  std::sort(ranges.begin(), ranges.end(), [](const TimeRange& a, const TimeRange& b) { return a.start < b.start; });
  std::vector<TimeRange> out;
  for (const auto& r : ranges) {
    if (!out.empty() && r.start <= out.back().end) {
      out.back().end = std::max(out.back().end, r.end);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

void CoverageIndex::add(const TimeRange& r) {
  auto next = ranges_;
  next.push_back(r);
  ranges_ = coalesce(std::move(next));
}

bool CoverageIndex::covers(const TimeRange& r) const { return missing_ranges(*this, r).empty(); }

std::vector<TimeRange> missing_ranges(const CoverageIndex& cov, const TimeRange& req) {
  std::vector<TimeRange> out;
  if (!req.valid()) return out;
  Timestamp cursor = req.start;
  for (const auto& c : cov.ranges()) {
    if (c.end <= cursor) continue;
    if (c.start >= req.end) break;
    if (c.start > cursor) out.push_back({cursor, c.start});
    cursor = std::max(cursor, c.end);
    if (cursor >= req.end) break;
  }
  if (cursor < req.end) out.push_back({cursor, req.end});
  return out;
}

}  // namespace sfwi::infer
