#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "sfwi/sfwi.h"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Dir {
  fs::path path;
  explicit Dir(const std::string& tag) {
    static std::atomic<int> n{0};
    path = fs::temp_directory_path() / ("sfwi-capi-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string take(char* p) {
  std::string s = p ? p : "";
  sfwi_free(p);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  int rc = std::system((std::string(SFWI_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// One day of three nodes, shared by several cases.
struct Synth {
  std::string csv, nodes;
  Synth() {
    sfwi_synth_options o;
    sfwi_synth_options_init(&o);
    o.nodes = 3;
    o.from = "2012-01-09T00:00:00Z";
    o.to = "2012-01-10T00:00:00Z";
    o.seed = 5;
    char *c = nullptr, *n = nullptr;
    REQUIRE(sfwi_synth(&o, &c, &n) == SFWI_OK);
    csv = take(c);
    nodes = take(n);
  }
};

sfwi_store* open_store(const char* dir, const std::string& nodes, const char* rules = nullptr) {
  sfwi_options o;
  sfwi_options_init(&o);
  o.store_dir = dir;
  o.nodes_json = nodes.empty() ? nullptr : nodes.c_str();
  o.rules_dir = rules;
  o.threads = 2;
  sfwi_store* s = nullptr;
  REQUIRE(sfwi_open(&o, &s) == SFWI_OK);
  return s;
}

}  // namespace

TEST_CASE("utility calls") {
  CHECK(std::string(sfwi_version()) == "0.1.0");
  CHECK(std::string(sfwi_status_name(SFWI_NOT_FOUND)) == "not_found");
  int m = 0;
  CHECK(sfwi_parse_utc_offset("-03:30", &m) == SFWI_OK);
  CHECK(m == -210);
  CHECK(sfwi_parse_utc_offset("tomorrow", &m) == SFWI_PARSE);
  CHECK(std::string(sfwi_last_error()).size() > 0);
  CHECK(sfwi_parse_utc_offset(nullptr, &m) == SFWI_INVALID_ARGUMENT);
  sfwi_options o;
  sfwi_options_init(&o);
  CHECK(o.utc_offset_minutes == 600);
  CHECK(sfwi_open(&o, nullptr) == SFWI_INVALID_ARGUMENT);
  sfwi_free(nullptr);
}

TEST_CASE("synth, ingest, infer and request through the C API") {
  Synth s;
  CHECK(std::count(s.csv.begin(), s.csv.end(), '\n') == 3 * 144 * 3);
  CHECK(json::parse(s.nodes)["nodes"].size() == 3);

  sfwi_store* store = open_store(nullptr, s.nodes);
  char* out = nullptr;
  REQUIRE(sfwi_ingest(store, nullptr, s.csv.data(), s.csv.size(), &out) == SFWI_OK);
  auto summary = json::parse(take(out));
  CHECK(summary["observations"] == 3 * 144 * 3);
  CHECK(summary["graphs"].size() == 3);
  CHECK(summary["triples"] == 3 * 2163);

  REQUIRE(sfwi_infer(store, "2012-01-09T00:00:00Z", "2012-01-09T01:00:00Z", &out) == SFWI_OK);
  auto inferred = json::parse(take(out));
  CHECK(inferred["events"] == 18);

  int status = 0;
  REQUIRE(sfwi_request(store, "GET", "/fwi", "from=2012-01-09T00%3A00%3A00Z&to=2012-01-09T01:00:00Z&nx=2&ny=2", nullptr, 0,
                       &status, &out) == SFWI_OK);
  CHECK(status == 200);
  auto fwi = json::parse(take(out));
  CHECK(fwi["frames"].size() == 6);

  REQUIRE(sfwi_request(store, "GET", "/fwi", "from=bad&to=2012-01-09T01:00:00Z", nullptr, 0, &status, &out) == SFWI_OK);
  CHECK(status == 400);
  CHECK(json::parse(take(out))["field"] == "from");

  CHECK(sfwi_ingest(store, "pressure", "x", 1, &out) == SFWI_INVALID_ARGUMENT);
  CHECK(std::string(sfwi_last_error_field()) == "property");
  CHECK(sfwi_ingest(store, "air_temperature", "nonsense\n", 9, &out) == SFWI_PARSE);
  CHECK(sfwi_infer(store, "2012-01-09T01:00:00Z", "2012-01-09T00:00:00Z", &out) == SFWI_INVALID_ARGUMENT);
  sfwi_close(store);
}

TEST_CASE("disk store: reopen keeps data, nodes and mode") {
  Synth s;
  Dir dir("disk");
  sfwi_store* store = open_store(dir.path.c_str(), s.nodes);
  char* out = nullptr;
  REQUIRE(sfwi_ingest(store, nullptr, s.csv.data(), s.csv.size(), &out) == SFWI_OK);
  sfwi_free(out);
  sfwi_close(store);
  CHECK(fs::exists(dir.path / "nodes.json"));
  CHECK(fs::exists(dir.path / "catalog.tsv"));

  store = open_store(dir.path.c_str(), "");
  int status = 0;
  REQUIRE(sfwi_request(store, "GET", "/health", "", nullptr, 0, &status, &out) == SFWI_OK);
  CHECK(json::parse(take(out))["weather_triples"].get<int>() > 0);
  REQUIRE(sfwi_request(store, "GET", "/fwi/timeline", "from=2012-01-09T00:00:00Z&to=2012-01-09T01:00:00Z&node=SN_3",
                       nullptr, 0, &status, &out) == SFWI_OK);
  CHECK(status == 200);
  CHECK(json::parse(take(out)).size() == 6);
  sfwi_close(store);

  sfwi_options o;
  sfwi_options_init(&o);
  o.store_dir = dir.path.c_str();
  o.single_mode = 1;
  sfwi_store* wrong = nullptr;
  CHECK(sfwi_open(&o, &wrong) == SFWI_INVALID_ARGUMENT);
  CHECK(std::string(sfwi_last_error_field()) == "single_mode");
}

TEST_CASE("rulegen writes a readable rule set") {
  Dir dir("rules");
  char* out = nullptr;
  REQUIRE(sfwi_rulegen(R"({"temperature":[0,20,45],"humidity":[0,50,100],"wind":[0,10,25]})", dir.path.c_str(), &out) ==
          SFWI_OK);
  CHECK(json::parse(take(out))["rules"] == 8);
  CHECK(fs::exists(dir.path / "manifest.json"));
  sfwi_store* store = open_store(nullptr, "", dir.path.c_str());
  int status = 0;
  REQUIRE(sfwi_request(store, "GET", "/health", "", nullptr, 0, &status, &out) == SFWI_OK);
  CHECK(json::parse(take(out))["rules"] == 8);
  sfwi_close(store);
  CHECK(sfwi_rulegen("hexagonal", dir.path.c_str(), &out) == SFWI_INVALID_ARGUMENT);
}

TEST_CASE("HTTP server answers on a bound port") {
  Synth s;
  sfwi_store* store = open_store(nullptr, s.nodes);
  char* out = nullptr;
  REQUIRE(sfwi_ingest(store, nullptr, s.csv.data(), s.csv.size(), &out) == SFWI_OK);
  sfwi_free(out);

  sfwi_server* server = nullptr;
  int port = 0;
  REQUIRE(sfwi_server_start(store, "127.0.0.1", 0, &server, &port) == SFWI_OK);
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  auto r = cli.Get("/fwi?from=2012-01-09T00:00:00Z&to=2012-01-09T01:00:00Z&nx=2&ny=2");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["frames"].size() == 6);
  int status = 0;
  REQUIRE(sfwi_request(store, "GET", "/fwi", "from=2012-01-09T00:00:00Z&to=2012-01-09T01:00:00Z&nx=2&ny=2", nullptr, 0,
                       &status, &out) == SFWI_OK);
  CHECK(take(out) == r->body);

  auto missing = cli.Get("/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto wrong = cli.Post("/fwi", "", "text/plain");
  REQUIRE(wrong);
  CHECK(wrong->status == 405);
  auto ui = cli.Get("/ui/");
  REQUIRE(ui);
  CHECK(ui->status == 200);
  auto ingest = cli.Post("/ingest?property=wind_speed", "2012-01-11 10:00:00, wind_speed, WS_1, SN_1, 3.5, m/s\n",
                         "text/csv");
  REQUIRE(ingest);
  CHECK(ingest->status == 200);
  CHECK(json::parse(ingest->body)["observations"] == 1);

  sfwi_server_stop(server);
  sfwi_server_wait(server);
  sfwi_server_free(server);
  sfwi_close(store);
}

TEST_CASE("CLI: exit codes and output matching the library") {
  Dir dir("cli");
  const std::string store = "--store " + (dir.path / "store").string();
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("bogus") == 2);
  CHECK(run(store + " query --from 2012-01-09T01:00:00Z --to 2012-01-09T00:00:00Z") == 2);
  CHECK(run(store + " query --from 2012-01-09T00:00:00Z") == 2);

  const std::string csv = (dir.path / "obs.csv").string(), nodes = (dir.path / "nodes.json").string();
  REQUIRE(run("synth --from 2012-01-09T00:00:00Z --to 2012-01-09T06:00:00Z --count 3 --out " + csv + " --nodes-out " +
              nodes) == 0);
  CHECK(run(store + " --nodes " + nodes + " ingest --file " + csv) == 0);
  CHECK(run(store + " ingest --property pressure --file " + csv) == 2);
  CHECK(run(store + " ingest --file " + (dir.path / "missing.csv").string()) != 0);

  const std::string body = (dir.path / "q.json").string();
  REQUIRE(run(store + " query --from 2012-01-09T00:00:00Z --to 2012-01-09T01:00:00Z --nx 3 --ny 2 --out " + body) == 0);
  const std::string kml = (dir.path / "q.kml").string();
  REQUIRE(run(store + " query --kml --from 2012-01-09T00:00:00Z --to 2012-01-09T01:00:00Z --out " + kml) == 0);
  CHECK(slurp(kml).find("<kml") != std::string::npos);
  CHECK(run(store + " stats --from 2012-01-09T00:00:00Z --to 2012-01-09T06:00:00Z") == 0);
  CHECK(run(store + " stats --from 2012-01-09T00:00:00Z --to 2012-01-09T06:00:00Z --node SN_7") == 2);

  sfwi_store* s = open_store((dir.path / "store").c_str(), "");
  int status = 0;
  char* out = nullptr;
  REQUIRE(sfwi_request(s, "GET", "/fwi", "from=2012-01-09T00:00:00Z&to=2012-01-09T01:00:00Z&nx=3&ny=2", nullptr, 0,
                       &status, &out) == SFWI_OK);
  CHECK(status == 200);
  CHECK(take(out) == slurp(body));
  sfwi_close(s);
}
