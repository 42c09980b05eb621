#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/time.hpp"
#include "rules/rule.hpp"
#include "store/repository.hpp"

namespace sfwi::bench {

inline constexpr const char* kLabels[4] = {"NQ-1R", "RQ-1R", "NQ-MR", "RQ-MR"};

struct BenchSpec {
  std::vector<std::int64_t> periods{3600, 6 * 3600, 12 * 3600, 86400, 3 * 86400, 7 * 86400, 14 * 86400, 30 * 86400};
  int repetitions = 3;
  std::uint64_t seed = 42;
  std::size_t target_triples = 145000;
  int nodes = 1;
  Timestamp start = from_civil(2012, 1, 1);
  unsigned threads = 0;

  void validate() const;  // periods ascending, repetitions >= 3
};

struct BenchRow {
  std::int64_t period_seconds = 0;
  std::string label;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  std::size_t triples = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // per period: NQ-1R, RQ-1R, NQ-MR, RQ-MR
  std::size_t triples = 0;     // weather triples in the dataset
  TimeRange dataset;
  // Periods whose RQ payload differed from NQ, or whose 1R and MR payloads differed.
  std::vector<std::int64_t> mismatched_periods;

  const BenchRow& row(std::int64_t period_seconds, const std::string& label) const;
  // period_seconds,label,median_ms,min_ms,max_ms,triples
  std::string csv() const;
};

// The seeded synthetic corpus: whole days of `spec.nodes` nodes, as many as
// bring the weather triple count closest to the target.
struct Dataset {
  std::unique_ptr<store::RepositorySet> single;
  std::unique_ptr<store::RepositorySet> multi;
  TimeRange range;
};
Dataset build_dataset(const BenchSpec& spec);

using Progress = std::function<void(const BenchRow&)>;

// Sequential NQ/RQ timings in both storage modes. NQ runs against a cleared
// FWI repository; RQ repeats the same query right after.
BenchReport bench_run(const BenchSpec& spec, const rules::RuleSet& rules, const Progress& progress = {});
BenchReport bench_run(const BenchSpec& spec, Dataset& data, const rules::RuleSet& rules,
                      const Progress& progress = {});

}  // namespace sfwi::bench
