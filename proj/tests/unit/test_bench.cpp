#include <algorithm>
#include <sstream>

#include "bench/bench.hpp"
#include "doctest.h"
#include "ffdi/ffdi.hpp"

using namespace sfwi;
using namespace sfwi::bench;

TEST_CASE("bench_run: a small spec yields four rows per period") {
  BenchSpec spec;
  spec.periods = {3600, 6 * 3600};
  spec.repetitions = 3;
  spec.target_triples = 3000;
  spec.threads = 2;
  auto rules = ffdi::generate_rule_table(ffdi::uniform_grid_spec(9, 20, 5));
  std::vector<std::string> seen;
  auto report = bench_run(spec, rules, [&](const BenchRow& r) { seen.push_back(r.label); });
  REQUIRE(report.rows.size() == 8);
  CHECK(seen.size() == 8);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    CHECK(r.label == kLabels[i % 4]);
    CHECK(r.period_seconds == spec.periods[i / 4]);
    CHECK(r.min_ms <= r.median_ms);
    CHECK(r.median_ms <= r.max_ms);
    CHECK(r.triples == report.triples);
  }
  // One day of one node: 144 slots x 3 properties x 5 triples + 3 placements.
  CHECK(report.triples == 2163);
  CHECK(report.dataset.duration_seconds() >= 6 * 3600);
  CHECK(report.mismatched_periods.empty());
  CHECK_NOTHROW(report.row(3600, "RQ-MR"));
  CHECK_THROWS_AS(report.row(60, "RQ-MR"), Error);

  std::string csv = report.csv();
  CHECK(csv.starts_with("period_seconds,label,median_ms,min_ms,max_ms,triples\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("BenchSpec validation") {
  BenchSpec s;
  CHECK_NOTHROW(s.validate());
  s.periods = {600, 60};
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.repetitions = 2;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.periods.clear();
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.nodes = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}
