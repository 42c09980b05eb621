#include <atomic>
#include <cctype>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfwi/sfwi.h"

namespace {

constexpr int kUsage = 2;

struct Globals {
  std::string store;
  std::string rules;
  std::string nodes;
  std::string utc_offset = "+10:00";
  std::uint64_t seed = 42;
  bool json = false;
  bool single = false;
  unsigned threads = 0;
};

struct Failure {
  int code;
};

// Owned C string returned by the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { sfwi_free(p); }
  std::string str() const { return p ? p : ""; }
};

[[noreturn]] void fail(sfwi_status st) {
  std::cerr << "error: " << sfwi_status_name(st) << ": " << sfwi_last_error();
  std::string field = sfwi_last_error_field();
  if (!field.empty()) std::cerr << " (" << field << ")";
  std::cerr << "\n";
  throw Failure{st == SFWI_INVALID_ARGUMENT || st == SFWI_PARSE ? kUsage : 1};
}

void check(sfwi_status st) {
  if (st != SFWI_OK) fail(st);
}

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Failure{1};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    throw Failure{1};
  }
}

int offset_minutes(const Globals& g) {
  int m = 0;
  check(sfwi_parse_utc_offset(g.utc_offset.c_str(), &m));
  return m;
}

// RAII store handle built from the global flags.
struct Store {
  sfwi_store* h = nullptr;
  explicit Store(const Globals& g, const std::string& ui_dir = {}) {
    std::string nodes_json;
    if (!g.nodes.empty()) nodes_json = slurp(g.nodes);
    sfwi_options o;
    sfwi_options_init(&o);
    o.store_dir = g.store.empty() ? nullptr : g.store.c_str();
    o.rules_dir = g.rules.empty() ? nullptr : g.rules.c_str();
    o.nodes_json = nodes_json.empty() ? nullptr : nodes_json.c_str();
    o.ui_dir = ui_dir.empty() ? nullptr : ui_dir.c_str();
    o.single_mode = g.single ? 1 : 0;
    o.utc_offset_minutes = offset_minutes(g);
    o.threads = g.threads;
    check(sfwi_open(&o, &h));
  }
  ~Store() { sfwi_close(h); }
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;
};

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ',' || c == ':') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string query_string(const std::vector<std::pair<std::string, std::string>>& params) {
  std::string q;
  for (const auto& [k, v] : params) {
    if (v.empty()) continue;
    if (!q.empty()) q += '&';
    q += k + "=" + url_encode(v);
  }
  return q;
}

// Runs a GET against the in-process service; non-2xx bodies go to stderr.
void get(const Globals& g, const std::string& path, const std::string& query, const std::string& out_path) {
  Store s(g);
  int status = 0;
  CStr body;
  check(sfwi_request(s.h, "GET", path.c_str(), query.c_str(), nullptr, 0, &status, &body.p));
  if (status / 100 != 2) {
    std::cerr << "error: HTTP " << status << ": " << body.str();
    throw Failure{status / 100 == 4 ? kUsage : 1};
  }
  emit(body.str(), out_path);
}

// "key: value" lines for human output; nested graphs list their contexts.
void print_summary(const std::string& text, bool as_json) {
  if (as_json) {
    std::cout << text;
    return;
  }
  auto j = nlohmann::ordered_json::parse(text);
  for (const auto& [k, v] : j.items()) {
    if (v.is_array() && k == "graphs") {
      for (const auto& graph : v)
        if (graph["context"].is_string()) std::cout << "context: " << graph["context"].get<std::string>() << "\n";
    } else if (v.is_string()) {
      std::cout << k << ": " << v.get<std::string>() << "\n";
    } else {
      std::cout << k << ": " << v.dump() << "\n";
    }
  }
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic fire-weather index engine"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store, "Store directory (in-memory when omitted)");
  app.add_option("--rules", g.rules, "Rule set directory (default generated table when omitted)");
  app.add_option("--nodes", g.nodes, "Node registry JSON file");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--seed", g.seed, "Seed for synthetic data")->capture_default_str();
  app.add_option("--utc-offset", g.utc_offset, "Local time offset of CSV records")->capture_default_str();
  app.add_flag("--single", g.single, "Single undivided weather repository");
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)");

  std::string property, file = "-";
  auto* ingest = app.add_subcommand("ingest", "Clean and store an observation CSV");
  ingest->add_option("--property", property, "air_temperature | relative_humidity | wind_speed (omit for mixed)");
  ingest->add_option("--file", file, "CSV file, '-' for stdin")->capture_default_str();

  std::string grid = "default", out;
  auto* rulegen = app.add_subcommand("rulegen", "Generate the FFDI rule table");
  rulegen->add_option("--grid", grid, "default | coarse | JSON edges")->capture_default_str();
  rulegen->add_option("--out", out, "Output directory")->required();

  std::string from, to;
  auto* infer = app.add_subcommand("infer", "Materialise FWI events for a time range");
  infer->add_option("--from", from, "ISO-8601 UTC")->required();
  infer->add_option("--to", to, "ISO-8601 UTC")->required();

  std::string bbox, mode, node_filter;
  int nx = 0, ny = 0, stride = 0;
  bool kml = false;
  auto* query = app.add_subcommand("query", "FWI raster frames and events (JSON, or KML)");
  query->add_option("--from", from, "ISO-8601 UTC")->required();
  query->add_option("--to", to, "ISO-8601 UTC")->required();
  query->add_option("--bbox", bbox, "S,W,N,E");
  query->add_option("--nx", nx, "Grid columns");
  query->add_option("--ny", ny, "Grid rows");
  query->add_option("--stride", stride, "Emit every n-th frame");
  query->add_option("--mode", mode, "ordinal | score");
  query->add_option("--node-filter", node_filter, "Comma-separated node ids");
  query->add_flag("--kml", kml, "KML document instead of JSON");
  query->add_option("--out", out, "Output file");

  std::string day_start, day_end, node;
  auto* stats = app.add_subcommand("stats", "Entire/day/night class distributions");
  stats->add_option("--from", from, "ISO-8601 UTC")->required();
  stats->add_option("--to", to, "ISO-8601 UTC")->required();
  stats->add_option("--day-start", day_start, "HH:MM local");
  stats->add_option("--day-end", day_end, "HH:MM local");
  stats->add_option("--node", node, "Per-node timeline instead of distributions");

  std::string host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Built web UI assets");

  std::vector<std::int64_t> periods;
  int reps = 3, bench_nodes = 1;
  std::size_t target = 145000;
  auto* bench = app.add_subcommand("bench", "NQ/RQ x 1R/MR query latency benchmark");
  bench->add_option("--periods", periods, "Query periods in seconds, ascending")->delimiter(',');
  bench->add_option("--reps", reps, "Repetitions per cell")->capture_default_str();
  bench->add_option("--target-triples", target, "Dataset size")->capture_default_str();
  bench->add_option("--bench-nodes", bench_nodes, "Sensor nodes in the dataset")->capture_default_str();
  bench->add_option("--out", out, "CSV report file");

  int synth_nodes = 5;
  double fault_rate = 0.0;
  std::string nodes_out;
  from = "2012-01-01T00:00:00Z";
  to = "2012-02-01T00:00:00Z";
  auto* synth = app.add_subcommand("synth", "Seeded synthetic observation stream");
  synth->add_option("--from", from, "ISO-8601 UTC")->capture_default_str();
  synth->add_option("--to", to, "ISO-8601 UTC")->capture_default_str();
  synth->add_option("--count", synth_nodes, "Number of nodes")->capture_default_str();
  synth->add_option("--fault-rate", fault_rate, "Fraction of gross outliers")->capture_default_str();
  synth->add_option("--out", out, "CSV output file");
  synth->add_option("--nodes-out", nodes_out, "Node registry JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest) {
      Store s(g);
      std::string csv = slurp(file);
      CStr res;
      check(sfwi_ingest(s.h, property.empty() ? nullptr : property.c_str(), csv.data(), csv.size(), &res.p));
      print_summary(res.str(), g.json);
    } else if (*rulegen) {
      CStr res;
      check(sfwi_rulegen(grid.c_str(), out.c_str(), &res.p));
      print_summary(res.str(), g.json);
    } else if (*infer) {
      Store s(g);
      CStr res;
      check(sfwi_infer(s.h, from.c_str(), to.c_str(), &res.p));
      print_summary(res.str(), g.json);
    } else if (*query) {
      std::string q = query_string({{"from", from},
                                    {"to", to},
                                    {"bbox", bbox},
                                    {"nx", nx ? std::to_string(nx) : ""},
                                    {"ny", ny ? std::to_string(ny) : ""},
                                    {"stride", stride ? std::to_string(stride) : ""},
                                    {"mode", mode},
                                    {"nodes", node_filter}});
      get(g, kml ? "/export/kml" : "/fwi", q, out);
    } else if (*stats) {
      if (!node.empty()) get(g, "/fwi/timeline", query_string({{"from", from}, {"to", to}, {"node", node}}), "");
      else
        get(g, "/fwi/stats",
            query_string({{"from", from}, {"to", to}, {"day_start", day_start}, {"day_end", day_end}}), "");
    } else if (*serve) {
      Store s(g, ui_dir);
      sfwi_server* srv = nullptr;
      int bound = 0;
      check(sfwi_server_start(s.h, host.c_str(), port, &srv, &bound));
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      sfwi_server_free(srv);
    } else if (*bench) {
      sfwi_bench_options o;
      sfwi_bench_options_init(&o);
      if (!periods.empty()) {
        o.periods = periods.data();
        o.period_count = periods.size();
      }
      o.repetitions = reps;
      o.seed = g.seed;
      o.target_triples = target;
      o.nodes = bench_nodes;
      o.rules_dir = g.rules.empty() ? nullptr : g.rules.c_str();
      o.threads = g.threads;
      o.progress = [](const char* row, void*) { std::cerr << row << "\n"; };
      CStr csv, summary;
      check(sfwi_bench(&o, &csv.p, &summary.p));
      if (!out.empty()) emit(csv.str(), out);
      if (g.json) std::cout << summary.str();
      else if (out.empty()) std::cout << csv.str();
    } else if (*synth) {
      sfwi_synth_options o;
      sfwi_synth_options_init(&o);
      o.nodes = synth_nodes;
      o.from = from.c_str();
      o.to = to.c_str();
      o.seed = g.seed;
      o.fault_rate = fault_rate;
      o.utc_offset_minutes = offset_minutes(g);
      CStr csv, nodes_json;
      check(sfwi_synth(&o, &csv.p, &nodes_json.p));
      emit(csv.str(), out);
      if (!nodes_out.empty()) emit(nodes_json.str(), nodes_out);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
