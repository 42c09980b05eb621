#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/error.hpp"
#include "doctest.h"
#include "ingest/clean.hpp"
#include "ingest/observation.hpp"
#include "ingest/synth.hpp"

using namespace sfwi;
using namespace sfwi::ingest;

namespace {

const UtcOffset kAest{600};

Observation obs(Timestamp t, PropertyKind p, const std::string& node, double v) {
  std::string prefix = p == PropertyKind::AirTemperature ? "AT_" : p == PropertyKind::RelativeHumidity ? "RH_" : "WS_";
  return {t, p, prefix + node, node, v, std::string(canonical_unit(p))};
}

NodeRegistry collocated(int n) {
  NodeRegistry r;
  for (int i = 0; i < n; ++i) r.add("N" + std::to_string(i), {-28.23, 153.27});
  return r;
}

bool is_sub_multiset(std::vector<Observation> sub, std::vector<Observation> all) {
  auto key = [](const Observation& o) { return format_observation(o, {0}); };
  std::multiset<std::string> a, b;
  for (auto& o : sub) a.insert(key(o));
  for (auto& o : all) b.insert(key(o));
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("parse_observation_line: the sample record") {
  auto o = parse_observation_line("2012-01-02 03:50:00, air_temperature, AT_1, SN_1, 13.5, \xC2\xB0" "C", kAest);
  CHECK(o.time == from_civil(2012, 1, 1, 17, 50));
  CHECK(o.property == PropertyKind::AirTemperature);
  CHECK(o.sensor_id == "AT_1");
  CHECK(o.node_id == "SN_1");
  CHECK(o.value == 13.5);
  CHECK(o.unit == "\xC2\xB0" "C");
  CHECK(format_observation(o, kAest) == "2012-01-02 03:50:00, air_temperature, AT_1, SN_1, 13.5, \xC2\xB0" "C");
}

TEST_CASE("parse_observation_line: errors carry line numbers and fields") {
  try {
    parse_observation_line("2012-01-02 03:50:00, air_temperature, AT_1, SN_1, abc, \xC2\xB0" "C", kAest, 7);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(e.line() == 7);
    CHECK(e.field() == "value");
  }
  CHECK_THROWS_AS(parse_observation_line("2012-01-02 03:50:00, wind_speed, WS_1, SN_1, 3.0, %", kAest), Error);
  CHECK_THROWS_AS(parse_observation_line("2012-01-02 03:50:00, wind_speed, WS_1, SN_1, 3.0", kAest), Error);
  CHECK_THROWS_AS(parse_observation_line("2012-01-02, wind_speed, WS_1, SN_1, 3.0, m/s", kAest), Error);
  CHECK_THROWS_AS(parse_observation_line("2012-01-02 03:50:00, pressure, P_1, SN_1, 3.0, hPa", kAest), Error);
  CHECK_THROWS_AS(parse_observation_line("2012-01-02 03:50:00, wind_speed, WS_1, SN_1, nan, m/s", kAest), Error);
}

TEST_CASE("CSV parse and serialise round trip") {
  std::string text =
      "2012-01-02 03:50:00,air_temperature,AT_1,SN_1,13.5,\xC2\xB0" "C\n\n"
      "2012-01-02 03:50:00,   relative_humidity, RH_1,SN_1 ,  57.25, %\n";
  auto v = parse_observation_csv(text, kAest);
  REQUIRE(v.size() == 2);
  CHECK(v[1].value == 57.25);
  CHECK(v[1].node_id == "SN_1");
  auto again = parse_observation_csv(to_csv(v, kAest), kAest);
  CHECK(again == v);
  CHECK_THROWS_AS(parse_observation_csv("x\n", kAest), Error);
}

TEST_CASE("format_decimal is shortest round-trip") {
  CHECK(format_decimal(13.5) == "13.5");
  CHECK(format_decimal(0.1) == "0.1");
  CHECK(format_decimal(100.0) == "100");
  CHECK(std::stod(format_decimal(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("node registry JSON") {
  auto r = default_node_registry(5);
  CHECK(r.size() == 5);
  CHECK(parse_node_registry_json(node_registry_to_json(r)) == r);
  CHECK_THROWS_AS(parse_node_registry_json(R"({"nodes":[{"id":"a","lat":95,"lon":0}]})"), Error);
  CHECK_THROWS_AS(parse_node_registry_json(R"({"nodes":[{"id":"a","lat":1,"lon":0},{"id":"a","lat":2,"lon":0}]})"),
                  Error);
}

TEST_CASE("synthetic stream: counts and determinism") {
  auto one = default_node_registry(1);
  TimeRange hour{from_civil(2012, 1, 9), from_civil(2012, 1, 9, 1)};
  std::string csv = generate_synthetic_stream(one, hour, 3, 0.0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 18);
  CHECK(csv == generate_synthetic_stream(one, hour, 3, 0.0));
  CHECK(csv != generate_synthetic_stream(one, hour, 4, 0.0));
  CHECK_THROWS_AS(generate_synthetic_stream(NodeRegistry{}, hour, 3, 0.0), Error);
  CHECK_THROWS_AS(generate_synthetic_stream(one, hour, 3, 1.0), Error);
}

TEST_CASE("synthetic stream: injected fault count is binomial") {
  // 10,008 records; the count must sit within 3 sigma of n*p.
  auto nodes = default_node_registry(2);
  TimeRange r{from_civil(2012, 1, 1), from_civil(2012, 1, 1) };
  r.end.seconds = r.start.seconds + 1668 * kSlotSeconds;
  auto s = generate_synthetic(nodes, r, 11, 0.1);
  const double n = static_cast<double>(s.observations.size());
  CHECK(n == 10008);
  const double k = static_cast<double>(std::count(s.injected.begin(), s.injected.end(), 1));
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  CHECK(std::abs(k - n * 0.1) <= 3 * sigma);
}

TEST_CASE("clean_stream: single node in range keeps everything") {
  auto nodes = default_node_registry(1);
  TimeRange day{from_civil(2012, 1, 9), from_civil(2012, 1, 10)};
  auto s = generate_synthetic(nodes, day, 1, 0.0);
  auto r = clean_stream(s.observations, nodes, CleanConfig{});
  CHECK(r.clean == s.observations);
  CHECK(r.report.empty());
}

TEST_CASE("clean_stream: range violation") {
  auto nodes = default_node_registry(1);
  Timestamp t = from_civil(2012, 1, 9);
  std::vector<Observation> in{obs(t, PropertyKind::AirTemperature, "SN_1", 95.0),
                              obs(t, PropertyKind::AirTemperature, "SN_1", 20.0)};
  auto r = clean_stream(in, nodes, CleanConfig{});
  REQUIRE(r.report.size() == 1);
  CHECK(r.report.outliers[0].reason == OutlierReason::Range);
  CHECK(r.report.range_count == 1);
  CHECK(r.clean.size() == 1);
}

TEST_CASE("clean_stream: neighbour residual on four collocated nodes") {
  auto nodes = collocated(4);
  Timestamp t = from_civil(2012, 1, 9, 2, 3);
  std::vector<Observation> in{obs(t, PropertyKind::AirTemperature, "N0", 20.0),
                              obs(t, PropertyKind::AirTemperature, "N1", 20.1),
                              obs(t, PropertyKind::AirTemperature, "N2", 19.9),
                              obs(t, PropertyKind::AirTemperature, "N3", 45.0)};
  // Hand enumeration: neighbours of N3 are {20.0, 20.1, 19.9}, median 20.0,
  // residual 25 > 5. Every other reading has median 20.0 or 20.1 among its
  // neighbours and a residual below 0.3.
  auto r = clean_stream(in, nodes, CleanConfig{});
  REQUIRE(r.report.size() == 1);
  CHECK(r.report.outliers[0].observation.node_id == "N3");
  CHECK(r.report.outliers[0].reason == OutlierReason::NeighborResidual);
  CHECK(r.clean.size() == 3);

  CleanConfig flag;
  flag.policy = OutlierPolicy::Flag;
  auto f = clean_stream(in, nodes, flag);
  CHECK(f.clean == in);
  CHECK(f.report.size() == 1);
}

TEST_CASE("clean_stream: too few neighbours skips the residual test") {
  auto nodes = collocated(3);
  Timestamp t = from_civil(2012, 1, 9);
  std::vector<Observation> in{obs(t, PropertyKind::WindSpeed, "N0", 3.0), obs(t, PropertyKind::WindSpeed, "N1", 3.0),
                              obs(t, PropertyKind::WindSpeed, "N2", 60.0)};
  auto r = clean_stream(in, nodes, CleanConfig{});
  CHECK(r.report.empty());
}

TEST_CASE("clean_stream: unknown node and bad config") {
  auto nodes = default_node_registry(1);
  std::vector<Observation> in{obs(from_civil(2012, 1, 9), PropertyKind::WindSpeed, "SN_9", 3.0)};
  CHECK_THROWS_AS(clean_stream(in, nodes, CleanConfig{}), Error);
  CleanConfig bad;
  bad.neighbor_count = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CleanConfig bad2;
  bad2.residual_threshold[1] = 0.0;
  CHECK_THROWS_AS(bad2.validate(), Error);
}

TEST_CASE("clean_stream: conservation, subset and idempotence on faulty streams") {
  auto nodes = default_node_registry(6);
  TimeRange r{from_civil(2012, 1, 9), from_civil(2012, 1, 11)};
  auto s = generate_synthetic(nodes, r, 5, 0.05);
  auto first = clean_stream(s.observations, nodes, CleanConfig{});
  CHECK(first.clean.size() + first.report.size() == s.observations.size());
  CHECK(is_sub_multiset(first.clean, s.observations));
  auto second = clean_stream(first.clean, nodes, CleanConfig{});
  CHECK(second.report.empty());
  CHECK(second.clean == first.clean);

  std::string report = outlier_report_csv(first.report, kAest);
  CHECK(static_cast<std::size_t>(std::count(report.begin(), report.end(), '\n')) == first.report.size());
}
