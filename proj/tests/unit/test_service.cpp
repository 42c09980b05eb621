#include <algorithm>
#include <random>

#include "doctest.h"
#include "ffdi/ffdi.hpp"
#include "ingest/synth.hpp"
#include "json.hpp"
#include "service/pipeline.hpp"
#include "service/service.hpp"
#include "support.hpp"

using namespace sfwi;
using namespace sfwi::service;
using json = nlohmann::json;

namespace {

const TimeRange kDay{from_civil(2012, 1, 9), from_civil(2012, 1, 10)};

struct Fixture {
  std::unique_ptr<store::RepositorySet> repos = store::RepositorySet::in_memory();
  std::unique_ptr<infer::InferenceEngine> engine;
  std::unique_ptr<Service> service;
  ingest::NodeRegistry nodes = ingest::default_node_registry(3);

  explicit Fixture(std::filesystem::path ui_dir = {}) {
    auto s = ingest::generate_synthetic(nodes, kDay, 13, 0.0);
    ingest_stream(*repos, s.observations, nodes, ingest::CleanConfig{});
    infer::EngineOptions opt;
    opt.threads = 2;
    opt.clock = [] { return from_civil(2020, 1, 1); };
    engine = std::make_unique<infer::InferenceEngine>(*repos, ffdi::generate_rule_table(ffdi::uniform_grid_spec(9, 20, 5)),
                                                      opt);
    ServiceConfig cfg;
    cfg.nodes = nodes;
    cfg.default_nx = 4;
    cfg.default_ny = 3;
    cfg.ui_dir = std::move(ui_dir);
    service = std::make_unique<Service>(*repos, *engine, cfg);
  }

  Response get(const std::string& path, std::map<std::string, std::string> params = {}) {
    return service->handle({"GET", path, std::move(params), ""});
  }
};

infer::FwiEvent event_at(Timestamp t, int ordinal, const std::string& node = "SN_1") {
  return {node, t, FwiClass::from_ordinal(ordinal), {"r"}, Timestamp{0}};
}

}  // namespace

TEST_CASE("/fwi: one hour gives six frames, repeat is byte-identical and not re-inferred") {
  Fixture f;
  auto r = f.get("/fwi", {{"from", "2012-01-09T03:00:00Z"}, {"to", "2012-01-09T04:00:00Z"}});
  REQUIRE(r.status == 200);
  CHECK(r.content_type == "application/json");
  auto j = json::parse(r.body);
  REQUIRE(j["frames"].size() == 6);
  CHECK(j["frames"][0]["timestamp"] == "2012-01-09T03:00:00Z");
  CHECK(j["frames"][5]["timestamp"] == "2012-01-09T03:50:00Z");
  CHECK(j["events"].size() == 18);
  CHECK(j["gaps"].empty());
  CHECK(j["legend"].size() == 15);
  CHECK(j["nx"] == 4);
  for (const auto& fr : j["frames"]) {
    CHECK(fr["gap"] == false);
    REQUIRE(fr["values"].size() == 12);
    for (double v : fr["values"]) {
      CHECK(v >= 1.0);
      CHECK(v <= 15.0);
    }
  }
  auto evals = f.engine->rule_evaluations();
  auto again = f.get("/fwi", {{"from", "2012-01-09T03:00:00Z"}, {"to", "2012-01-09T04:00:00Z"}});
  CHECK(again.body == r.body);
  CHECK(f.engine->rule_evaluations() == evals);
}

TEST_CASE("/fwi: stride, node filter and bbox") {
  Fixture f;
  auto r = f.get("/fwi", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T06:00:00Z"}, {"stride", "6"},
                          {"nodes", "SN_2"}, {"bbox", "-29,152,-27,154"}, {"nx", "2"}, {"ny", "2"}});
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  CHECK(j["frames"].size() == 6);
  CHECK(j["frames"][1]["timestamp"] == "2012-01-09T01:00:00Z");
  CHECK(j["events"].size() == 36);
  for (const auto& e : j["events"]) CHECK(e["node"] == "SN_2");
  // One node: every cell carries its ordinal.
  for (const auto& fr : j["frames"]) {
    auto v = fr["values"];
    CHECK(std::all_of(v.begin(), v.end(), [&](const json& x) { return x == v[0]; }));
  }
  CHECK(j["bbox"] == json::array({-29, 152, -27, 154}));
}

TEST_CASE("/fwi: an un-ingested period is all gaps, not an error") {
  Fixture f;
  auto r = f.get("/fwi", {{"from", "2013-05-01T00:00:00Z"}, {"to", "2013-05-01T01:00:00Z"}});
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  REQUIRE(j["frames"].size() == 6);
  for (const auto& fr : j["frames"]) {
    CHECK(fr["gap"] == true);
    CHECK(fr["values"].empty());
  }
  REQUIRE(j["gaps"].size() == 1);
  CHECK(j["gaps"][0]["from"] == "2013-05-01T00:00:00Z");
  CHECK(j["gaps"][0]["to"] == "2013-05-01T01:00:00Z");
}

TEST_CASE("errors map to status codes with field diagnostics") {
  Fixture f;
  auto field_of = [](const Response& r) { return json::parse(r.body).value("field", ""); };
  auto r = f.get("/fwi", {{"to", "2012-01-09T01:00:00Z"}});
  CHECK(r.status == 400);
  CHECK(field_of(r) == "from");
  CHECK(json::parse(r.body)["code"] == "invalid_argument");
  r = f.get("/fwi", {{"from", "2012-01-09T01:00:00Z"}, {"to", "2012-01-09T00:00:00Z"}});
  CHECK(r.status == 400);
  r = f.get("/fwi", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"nx", "513"}});
  CHECK(r.status == 400);
  CHECK(field_of(r) == "nx");
  r = f.get("/fwi", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"bbox", "1,2,3"}});
  CHECK(field_of(r) == "bbox");
  r = f.get("/fwi", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"bbox", "3,2,1,4"}});
  CHECK(r.status == 400);
  r = f.get("/fwi", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"mode", "median"}});
  CHECK(field_of(r) == "mode");
  r = f.get("/fwi", {{"from", "2012-01-01T00:00:00Z"}, {"to", "2012-03-01T00:00:00Z"}});
  CHECK(r.status == 400);
  CHECK(field_of(r) == "stride");
  r = f.get("/fwi/timeline", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"node", "SN_9"}});
  CHECK(r.status == 404);
  CHECK(f.get("/nope").status == 404);
  CHECK(f.service->handle({"POST", "/fwi", {}, ""}).status == 405);
  CHECK(f.service->handle({"GET", "/ingest", {}, ""}).status == 405);
  r = f.get("/fwi/stats", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T01:00:00Z"}, {"day_start", "25:00"}});
  CHECK(field_of(r) == "day_start");
}

TEST_CASE("/fwi/timeline lists one node's events") {
  Fixture f;
  auto r = f.get("/fwi/timeline", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T02:00:00Z"}, {"node", "SN_3"}});
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  REQUIRE(j.size() == 12);
  CHECK(j[0]["time"] == "2012-01-09T00:00:00Z");
  CHECK(j[0].contains("ordinal"));
  CHECK(j[0].contains("label"));
}

TEST_CASE("compute_stats: day and night distributions") {
  // Local 12:00 and 00:00 at +10:00.
  const Timestamp noon = from_civil(2012, 1, 9, 2), midnight = from_civil(2012, 1, 9, 14);
  std::vector<infer::FwiEvent> events;
  auto add = [&](Timestamp base, int ordinal, int n) {
    for (int i = 0; i < n; ++i) {
      Timestamp t{base.seconds + kSlotSeconds * static_cast<std::int64_t>(events.size() % 12)};
      events.push_back(event_at(t, ordinal, "N" + std::to_string(events.size())));
    }
  };
  add(noon, 1, 6);
  add(noon, 2, 25);
  add(noon, 4, 9);
  add(midnight, 1, 33);
  add(midnight, 2, 8);
  add(midnight, 3, 1);
  add(midnight, 6, 3);
  add(midnight, 7, 6);
  auto r = compute_stats(events, kDay, 6 * 3600, 18 * 3600, UtcOffset{600});
  CHECK(r.day.total == 40);
  CHECK(r.night.total == 51);
  auto pct = [](const Distribution& d) {
    std::map<std::string, double> m;
    for (auto& [k, v] : d.percentages()) m[k] = v;
    return m;
  };
  auto day = pct(r.day), night = pct(r.night);
  CHECK(day["low-"] == doctest::Approx(15.0));
  CHECK(day["low"] == doctest::Approx(62.5));
  CHECK(day["moderate-"] == doctest::Approx(22.5));
  CHECK(night["low-"] == doctest::Approx(64.7).epsilon(1e-3));
  CHECK(night["low"] == doctest::Approx(15.7).epsilon(1e-3));
  CHECK(night["low+"] == doctest::Approx(2.0).epsilon(2e-2));
  CHECK(night["moderate+"] == doctest::Approx(5.9).epsilon(3e-3));
  CHECK(night["high-"] == doctest::Approx(11.8).epsilon(3e-3));

  // Everything at day: night empty.
  std::vector<infer::FwiEvent> only_day{event_at(noon, 5), event_at({noon.seconds + 600}, 5)};
  auto d = compute_stats(only_day, kDay, 6 * 3600, 18 * 3600, UtcOffset{600});
  CHECK(d.night.total == 0);
  CHECK(d.night.percentages().empty());
  REQUIRE(d.day.percentages().size() == 1);
  CHECK(d.day.percentages()[0] == std::pair<std::string, double>{"moderate", 100.0});

  CHECK_THROWS_AS(compute_stats(events, kDay, 3600, 3600, UtcOffset{600}), Error);
}

TEST_CASE("compute_stats: windows wrapping midnight and conservation against a recount") {
  std::mt19937_64 rng(44);
  std::vector<infer::FwiEvent> events;
  for (int i = 0; i < 400; ++i)
    events.push_back(event_at({kDay.start.seconds + static_cast<std::int64_t>(rng() % 144) * kSlotSeconds},
                              1 + static_cast<int>(rng() % 15), "N" + std::to_string(i)));
  for (int trial = 0; trial < 30; ++trial) {
    int a = static_cast<int>(rng() % 24) * 3600, b = static_cast<int>(rng() % 24) * 3600 + 1800;
    UtcOffset off{static_cast<int>(rng() % 25) * 60 - 720};
    auto r = compute_stats(events, kDay, a, b, off);
    std::size_t day = 0;
    for (const auto& e : events) {
      int sod = static_cast<int>(((e.time.seconds + off.minutes * 60) % 86400 + 86400) % 86400);
      day += a < b ? (sod >= a && sod < b) : (sod >= a || sod < b);
    }
    CHECK(r.day.total == day);
    CHECK(r.day.total + r.night.total == r.entire.total);
    for (int o = 1; o <= 15; ++o) {
      auto n = [&](const Distribution& d) { return d.counts.contains(o) ? d.counts.at(o) : 0; };
      CHECK(n(r.day) + n(r.night) == n(r.entire));
    }
  }
}

TEST_CASE("/fwi/stats body") {
  Fixture f;
  auto r = f.get("/fwi/stats", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-10T00:00:00Z"}});
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  CHECK(j["day_window"]["start"] == "06:00");
  CHECK(j["day_window"]["end"] == "18:00");
  CHECK(j["day_window"]["utc_offset"] == "+10:00");
  CHECK(j["entire"]["total"] == 3 * 144);
  CHECK(j["day"]["total"].get<int>() + j["night"]["total"].get<int>() == 3 * 144);
  for (const char* part : {"entire", "day", "night"}) {
    double sum = 0;
    for (auto& [k, v] : j[part]["percentages"].items()) sum += v.get<double>();
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-3));
  }
}

TEST_CASE("/export/kml") {
  Fixture f;
  auto r = f.get("/export/kml", {{"from", "2012-01-09T00:00:00Z"}, {"to", "2012-01-09T00:30:00Z"}, {"nx", "2"}, {"ny", "2"}});
  REQUIRE(r.status == 200);
  CHECK(r.content_type == "application/vnd.google-earth.kml+xml");
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = r.body.find(needle); p != std::string::npos; p = r.body.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count("<Style id=") == 15);
  CHECK(count("<Folder>") == 3);
  CHECK(count("<Placemark>") == 12);
  CHECK(r.body.starts_with("<?xml"));
}

TEST_CASE("class colours") {
  CHECK(class_color({Major::High, Sub::Mid}) == "fdd835");
  CHECK(class_color({Major::Low, Sub::Mid}).size() == 6);
  std::set<std::string> all;
  for (int o = 1; o <= 15; ++o) all.insert(class_color(FwiClass::from_ordinal(o)));
  CHECK(all.size() == 15);
}

TEST_CASE("/ui: placeholder, assets and traversal guard") {
  test::TempDir dir("ui");
  {
    std::ofstream(dir.path / "app.js") << "console.log(1)";
  }
  Fixture f(dir.path);
  auto idx = f.get("/ui");
  CHECK(idx.status == 200);
  CHECK(idx.content_type.starts_with("text/html"));
  CHECK(f.get("/ui/").status == 200);
  auto js = f.get("/ui/app.js");
  CHECK(js.status == 200);
  CHECK(js.body == "console.log(1)");
  CHECK(js.content_type == "application/javascript");
  CHECK(f.get("/ui/../secret").status == 404);
  CHECK(f.get("/ui/missing.css").status == 404);
}

TEST_CASE("/health and POST /ingest") {
  Fixture f;
  auto h = json::parse(f.get("/health").body);
  CHECK(h["status"] == "ok");
  CHECK(h["rules"] == 125);
  auto before = h["weather_triples"].get<std::size_t>();

  std::string csv =
      "2012-01-11 10:00:00, air_temperature, AT_1, SN_1, 30.5, \xC2\xB0" "C\n"
      "2012-01-11 10:10:00, air_temperature, AT_1, SN_1, 31.0, \xC2\xB0" "C\n"
      "2012-01-11 10:20:00, air_temperature, AT_1, SN_1, 99.0, \xC2\xB0" "C\n";
  auto r = f.service->handle({"POST", "/ingest", {{"property", "air_temperature"}}, csv});
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  CHECK(j["observations"] == 2);
  CHECK(j["outliers_removed"] == 1);
  CHECK(j["triples"] == 11);
  CHECK(j["context"].get<std::string>().starts_with("urn:graph:air_temperature:"));
  CHECK(json::parse(f.get("/health").body)["weather_triples"].get<std::size_t>() == before + 11);

  CHECK(f.service->handle({"POST", "/ingest", {{"property", "pressure"}}, csv}).status == 400);
  auto bad = f.service->handle({"POST", "/ingest", {{"property", "wind_speed"}}, csv});
  CHECK(bad.status == 400);
  CHECK(f.service->handle({"POST", "/ingest", {{"property", "air_temperature"}}, "garbage"}).status == 400);
}
