#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "doctest.h"
#include "ffdi/ffdi.hpp"
#include "infer/coverage.hpp"
#include "infer/engine.hpp"
#include "ingest/synth.hpp"
#include "store/vocab.hpp"
#include "support.hpp"

using namespace sfwi;
using namespace sfwi::infer;
using ingest::Observation;

namespace {

const Timestamp kNoon = from_civil(2012, 1, 2, 12);
const Timestamp kFixed = from_civil(2020, 1, 1);

EngineOptions fixed_clock(unsigned threads = 2) {
  EngineOptions o;
  o.threads = threads;
  o.clock = [] { return kFixed; };
  return o;
}

rules::RuleSet high_only() {
  rules::RuleSet s;
  s.rules.push_back(rules::parse_rule(ffdi::box_rule_text("high", {32, 41, 80, 100, 17.5, 24.4}, {Major::High, Sub::Mid})));
  return s;
}

void store_all(store::RepositorySet& repos, const std::vector<Observation>& obs) {
  for (PropertyKind p : kAllProperties) {
    std::vector<Observation> batch;
    for (const auto& o : obs)
      if (o.property == p) batch.push_back(o);
    if (!batch.empty()) repos.store_graph(batch, p);
  }
}

// Per (node, slot) class by looking the reading triple up in the grid boxes.
std::map<std::pair<std::string, std::int64_t>, FwiClass> box_oracle(const rules::RuleSet& set,
                                                                    const std::vector<Observation>& obs,
                                                                    const TimeRange& range) {
  std::map<std::pair<std::string, std::int64_t>, std::array<std::optional<double>, 3>> readings;
  for (const auto& o : obs)
    if (range.contains(o.time)) readings[{o.node_id, o.time.seconds}][static_cast<int>(o.property)] = o.value;
  std::map<std::pair<std::string, std::int64_t>, FwiClass> out;
  for (const auto& [key, r] : readings) {
    if (!r[0] || !r[1] || !r[2]) continue;
    std::optional<FwiClass> best;
    for (const auto& rule : set.rules) {
      auto iv = rules::filter_intervals(rule.filter);
      if (iv.at("AT_OB1V").contains(*r[0]) && iv.at("RH_OB1V").contains(*r[1]) && iv.at("WS_OB1V").contains(*r[2]))
        if (!best || rule.asserted_class() > *best) best = rule.asserted_class();
    }
    if (best) out[key] = *best;
  }
  return out;
}

std::vector<std::tuple<std::string, std::int64_t, int>> outcome(const std::vector<FwiEvent>& events) {
  std::vector<std::tuple<std::string, std::int64_t, int>> out;
  for (const auto& e : events) out.emplace_back(e.node_id, e.time.seconds, e.cls.ordinal());
  return out;
}

}  // namespace

TEST_CASE("missing_ranges: examples") {
  auto h = [](int a, int b) { return TimeRange{{a * 3600LL}, {b * 3600LL}}; };
  CoverageIndex cov({h(2, 4), h(6, 8)});
  CHECK(missing_ranges(cov, h(0, 10)) == std::vector<TimeRange>{h(0, 2), h(4, 6), h(8, 10)});
  CHECK(missing_ranges(cov, h(2, 4)).empty());
  CHECK(missing_ranges(cov, h(3, 7)) == std::vector<TimeRange>{h(4, 6)});
  CHECK(missing_ranges(CoverageIndex{}, h(1, 2)) == std::vector<TimeRange>{h(1, 2)});
  CHECK(coalesce({h(1, 2), h(2, 3), h(5, 5), h(0, 1)}) == std::vector<TimeRange>{h(0, 3)});
  cov.add(h(4, 6));
  CHECK(cov.ranges() == std::vector<TimeRange>{h(2, 8)});
  CHECK(cov.covers(h(3, 7)));
}

TEST_CASE("missing_ranges agrees with a per-slot oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TimeRange> pieces;
    std::vector<char> covered(100, 0);
    for (int k = 0; k < 5; ++k) {
      int a = static_cast<int>(rng() % 100), len = static_cast<int>(rng() % 15);
      int b = std::min(100, a + len);
      pieces.push_back({{a * kSlotSeconds}, {b * kSlotSeconds}});
      for (int s = a; s < b; ++s) covered[static_cast<std::size_t>(s)] = 1;
    }
    int qa = static_cast<int>(rng() % 90), qb = qa + 1 + static_cast<int>(rng() % (100 - qa));
    auto miss = missing_ranges(CoverageIndex(pieces), {{qa * kSlotSeconds}, {qb * kSlotSeconds}});
    std::vector<char> got(100, 0);
    for (std::size_t i = 0; i < miss.size(); ++i) {
      CHECK(miss[i].valid());
      if (i) CHECK(miss[i - 1].end < miss[i].start);  // minimal: never adjacent
      for (auto t = miss[i].start.seconds; t < miss[i].end.seconds; t += kSlotSeconds)
        got[static_cast<std::size_t>(t / kSlotSeconds)] = 1;
    }
    for (int s = 0; s < 100; ++s)
      CHECK(got[static_cast<std::size_t>(s)] == (s >= qa && s < qb && !covered[static_cast<std::size_t>(s)]));
  }
}

TEST_CASE("worked example: one High event, then a cached repeat") {
  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, test::worked_example_observations());
  InferenceEngine engine(*repos, high_only(), fixed_clock());
  TimeRange day{from_civil(2012, 1, 2), from_civil(2012, 1, 3)};
  auto events = engine.query_fwi(day);
  REQUIRE(events.size() == 1);
  CHECK(events[0].node_id == "SN_1");
  CHECK(events[0].time == kNoon);
  CHECK(events[0].cls == FwiClass(Major::High, Sub::Mid));
  CHECK(events[0].rule_names == std::vector<std::string>{"high"});
  CHECK(events[0].generated_at == kFixed);
  CHECK(engine.rule_evaluations() == 1);
  CHECK(engine.inference_runs() == 1);

  auto again = engine.query_fwi(day);
  CHECK(again == events);
  CHECK(engine.rule_evaluations() == 1);
  CHECK(engine.inference_runs() == 1);

  // A sub-range is already covered too.
  CHECK(engine.query_fwi({kNoon, from_civil(2012, 1, 2, 13)}) == events);
  CHECK(engine.inference_runs() == 1);
  CHECK(engine.search(day) == events);
}

TEST_CASE("a missing wind reading produces no event") {
  auto obs = test::worked_example_observations();
  obs.erase(obs.begin() + 1);
  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, obs);
  InferenceEngine engine(*repos, high_only(), fixed_clock());
  CHECK(engine.query_fwi({from_civil(2012, 1, 2), from_civil(2012, 1, 3)}).empty());
  CHECK(repos->coverage() == std::vector<TimeRange>{{from_civil(2012, 1, 2), from_civil(2012, 1, 3)}});
}

TEST_CASE("the highest ordinal wins at a (node, time)") {
  rules::RuleSet set = high_only();
  set.rules.push_back(rules::parse_rule(ffdi::box_rule_text("wide_moderate", {0, 45, 0, 100, 0, 25}, {Major::Moderate, Sub::Max})));
  set.rules.push_back(rules::parse_rule(ffdi::box_rule_text("high_too", {39, 41, 84, 86, 23, 24}, {Major::High, Sub::Mid})));
  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, test::worked_example_observations());
  InferenceEngine engine(*repos, set, fixed_clock());
  auto events = engine.query_fwi({from_civil(2012, 1, 2), from_civil(2012, 1, 3)});
  REQUIRE(events.size() == 1);
  CHECK(events[0].cls == FwiClass(Major::High, Sub::Mid));
  CHECK(events[0].rule_names == std::vector<std::string>{"high", "high_too"});
  CHECK(engine.rule_evaluations() == 3);
}

TEST_CASE("requests are widened to the slot grid") {
  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, test::worked_example_observations());
  InferenceEngine engine(*repos, high_only(), fixed_clock());
  CHECK(engine.query_fwi({{kNoon.seconds - 30}, {kNoon.seconds + 30}}).size() == 1);
  CHECK(repos->coverage() == std::vector<TimeRange>{{from_civil(2012, 1, 2, 11, 50), from_civil(2012, 1, 2, 12, 10)}});
  CHECK_THROWS_AS(engine.query_fwi({kNoon, kNoon}), Error);
}

TEST_CASE("events match the box oracle on a synthetic stream, in both storage modes") {
  auto nodes = ingest::default_node_registry(3);
  TimeRange range{from_civil(2012, 1, 9), from_civil(2012, 1, 10)};
  auto s = ingest::generate_synthetic(nodes, range, 31, 0.0);
  auto set = ffdi::generate_rule_table(ffdi::uniform_grid_spec(9, 20, 5));
  auto expect = box_oracle(set, s.observations, range);
  CHECK(expect.size() == 3 * 144);

  std::vector<std::tuple<std::string, std::int64_t, int>> want;
  for (const auto& [k, c] : expect) want.emplace_back(k.first, k.second, c.ordinal());
  auto by_time = [](const auto& a, const auto& b) {
    return std::tie(std::get<1>(a), std::get<0>(a)) < std::tie(std::get<1>(b), std::get<0>(b));
  };
  std::sort(want.begin(), want.end(), by_time);

  std::vector<FwiEvent> multi_events;
  for (auto mode : {store::StoreMode::Multi, store::StoreMode::Single}) {
    auto repos = store::RepositorySet::in_memory(mode);
    store_all(*repos, s.observations);
    InferenceEngine engine(*repos, set, fixed_clock());
    auto events = engine.query_fwi(range);
    CHECK(outcome(events) == want);
    if (mode == store::StoreMode::Multi) multi_events = events;
    else CHECK(events == multi_events);
  }
}

TEST_CASE("cache transparency: pieced-together queries equal one fresh query") {
  auto nodes = ingest::default_node_registry(2);
  TimeRange range{from_civil(2012, 1, 9), from_civil(2012, 1, 10)};
  auto s = ingest::generate_synthetic(nodes, range, 8, 0.0);
  auto set = ffdi::generate_rule_table(ffdi::uniform_grid_spec(9, 20, 5));

  auto fresh_repos = store::RepositorySet::in_memory();
  store_all(*fresh_repos, s.observations);
  InferenceEngine fresh(*fresh_repos, set, fixed_clock());
  auto whole = fresh.query_fwi(range);

  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, s.observations);
  InferenceEngine engine(*repos, set, fixed_clock(1));
  std::mt19937_64 rng(77);
  for (int i = 0; i < 8; ++i) {
    std::int64_t a = range.start.seconds + static_cast<std::int64_t>(rng() % 86400);
    std::int64_t b = std::min(range.end.seconds, a + 1 + static_cast<std::int64_t>(rng() % 20000));
    TimeRange part{{a}, {b}};
    auto got = engine.query_fwi(part);
    std::vector<FwiEvent> expect;
    for (const auto& e : whole)
      if (part.contains(e.time)) expect.push_back(e);
    CHECK(got == expect);
  }
  CHECK(engine.query_fwi(range) == whole);
  CHECK(repos->coverage() == std::vector<TimeRange>{range});
  CHECK(engine.query_fwi(range, std::set<std::string>{"SN_2"}).size() ==
        static_cast<std::size_t>(std::count_if(whole.begin(), whole.end(), [](const FwiEvent& e) { return e.node_id == "SN_2"; })));
  auto n = engine.inference_runs();
  engine.query_fwi(range);
  CHECK(engine.inference_runs() == n);

  engine.reset();
  CHECK(repos->coverage().empty());
  CHECK(engine.search(range).empty());
  CHECK(engine.query_fwi(range) == whole);
}

TEST_CASE("a failed FWI commit leaves coverage and events unchanged") {
  auto storage = std::make_unique<test::FaultyStorage>();
  auto* faulty = storage.get();
  store::RepositorySet repos(std::move(storage));
  store_all(repos, test::worked_example_observations());
  InferenceEngine engine(repos, high_only(), fixed_clock());
  TimeRange day{from_civil(2012, 1, 2), from_civil(2012, 1, 3)};
  faulty->fail_on = [](const std::string& name) { return name == "catalog.tsv" || name == "coverage.tsv"; };
  CHECK_THROWS_AS(engine.query_fwi(day), Error);
  CHECK(repos.coverage().empty());
  CHECK(engine.search(day).empty());

  faulty->fail_on = [](const std::string&) { return false; };
  auto events = engine.query_fwi(day);
  CHECK(events.size() == 1);
  CHECK(repos.coverage() == std::vector<TimeRange>{day});
}

TEST_CASE("events persist across reopen") {
  test::TempDir dir("infer");
  TimeRange day{from_civil(2012, 1, 2), from_civil(2012, 1, 3)};
  std::vector<FwiEvent> before;
  {
    auto repos = store::RepositorySet::open(dir.path);
    store_all(*repos, test::worked_example_observations());
    InferenceEngine engine(*repos, high_only(), fixed_clock());
    before = engine.query_fwi(day);
  }
  auto repos = store::RepositorySet::open(dir.path);
  InferenceEngine engine(*repos, high_only(), fixed_clock());
  CHECK(engine.query_fwi(day) == before);
  CHECK(engine.inference_runs() == 0);
}

TEST_CASE("decode_events reads back an FWI graph") {
  auto repos = store::RepositorySet::in_memory();
  store_all(*repos, test::worked_example_observations());
  InferenceEngine engine(*repos, high_only(), fixed_clock());
  auto events = engine.query_fwi({from_civil(2012, 1, 2), from_civil(2012, 1, 3)});
  auto fwi = repos->graphs(store::RepositoryId::Fwi);
  REQUIRE(fwi.size() == 1);
  CHECK(decode_events(fwi[0]) == events);
  CHECK(fwi[0].triples.size() == 5);
}
