#include "sfwi/sfwi.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>

#include "bench/bench.hpp"
#include "core/error.hpp"
#include "ffdi/ffdi.hpp"
#include "httplib.h"
#include "infer/engine.hpp"
#include "ingest/synth.hpp"
#include "json.hpp"
#include "service/http_server.hpp"
#include "service/pipeline.hpp"
#include "service/service.hpp"

using namespace sfwi;
using ojson = nlohmann::ordered_json;

struct sfwi_store {
  std::unique_ptr<store::RepositorySet> repos;
  std::unique_ptr<infer::InferenceEngine> engine;
  std::unique_ptr<service::Service> service;
};

struct sfwi_server {
  std::unique_ptr<service::HttpServer> http;
  std::thread thread;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_field;

sfwi_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return SFWI_INVALID_ARGUMENT;
    case ErrorCode::Domain: return SFWI_DOMAIN;
    case ErrorCode::Parse: return SFWI_PARSE;
    case ErrorCode::Io: return SFWI_IO;
    case ErrorCode::NotFound: return SFWI_NOT_FOUND;
    case ErrorCode::Internal: return SFWI_INTERNAL;
  }
  return SFWI_INTERNAL;
}

template <class F>
sfwi_status guarded(F&& f) {
  g_error.clear();
  g_field.clear();
  try {
    f();
    return SFWI_OK;
  } catch (const Error& e) {
    g_error = e.what();
    g_field = e.field();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return SFWI_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return SFWI_INTERNAL;
  }
}

template <class T>
T& deref(T* p, const char* name) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(name) + " is NULL", name);
  return *p;
}

const char* need(const char* p, const char* name) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(name) + " is NULL", name);
  return p;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string(), "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write " + p.string(), "file");
}

rules::RuleSet load_rules(const char* dir) {
  if (dir && *dir) return rules::read_ruleset(dir);
  return ffdi::generate_rule_table(ffdi::default_grid_spec());
}

ffdi::RuleGridSpec grid_from(const std::string& grid) {
  if (grid == "default") return ffdi::default_grid_spec();
  if (grid == "coarse") return ffdi::uniform_grid_spec(3.0, 10.0, 2.5);
  ojson j;
  try {
    j = ojson::parse(grid);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "grid must be 'default', 'coarse' or a JSON object", "grid");
  }
  ffdi::RuleGridSpec s = ffdi::default_grid_spec();
  try {
    if (j.contains("temperature")) s.temperature = j["temperature"].get<std::vector<double>>();
    if (j.contains("humidity")) s.humidity = j["humidity"].get<std::vector<double>>();
    if (j.contains("wind")) s.wind = j["wind"].get<std::vector<double>>();
    if (j.contains("drought_factor")) s.drought_factor = j["drought_factor"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad grid JSON: ") + e.what(), "grid");
  }
  s.validate();
  return s;
}

ojson ingest_json(const service::IngestResult& r) {
  return {{"context", r.context ? ojson(*r.context) : ojson(nullptr)},
          {"triples", r.triples},
          {"observations", r.observations},
          {"outliers_removed", r.outliers.size()}};
}

}  // namespace

extern "C" {

const char* sfwi_last_error(void) { return g_error.c_str(); }
const char* sfwi_last_error_field(void) { return g_field.c_str(); }

const char* sfwi_status_name(sfwi_status status) {
  switch (status) {
    case SFWI_OK: return "ok";
    case SFWI_INVALID_ARGUMENT: return to_string(ErrorCode::InvalidArgument);
    case SFWI_DOMAIN: return to_string(ErrorCode::Domain);
    case SFWI_PARSE: return to_string(ErrorCode::Parse);
    case SFWI_IO: return to_string(ErrorCode::Io);
    case SFWI_NOT_FOUND: return to_string(ErrorCode::NotFound);
    case SFWI_INTERNAL: return to_string(ErrorCode::Internal);
  }
  return "unknown";
}

const char* sfwi_version(void) { return "0.1.0"; }

void sfwi_free(char* p) { std::free(p); }

sfwi_status sfwi_parse_utc_offset(const char* text, int* minutes) {
  return guarded([&] { deref(minutes, "minutes") = parse_utc_offset(need(text, "text")).minutes; });
}

void sfwi_options_init(sfwi_options* opts) {
  if (!opts) return;
  *opts = sfwi_options{};
  opts->utc_offset_minutes = UtcOffset{}.minutes;
}

sfwi_status sfwi_open(const sfwi_options* opts, sfwi_store** out) {
  return guarded([&] {
    deref(out, "out") = nullptr;
    sfwi_options o{};
    if (opts) o = *opts;
    const auto mode = o.single_mode ? store::StoreMode::Single : store::StoreMode::Multi;

    service::ServiceConfig cfg;
    cfg.offset = UtcOffset{o.utc_offset_minutes};
    if (o.ui_dir) cfg.ui_dir = o.ui_dir;

    auto s = std::make_unique<sfwi_store>();
    if (o.store_dir && *o.store_dir) {
      std::filesystem::path root(o.store_dir);
      s->repos = store::RepositorySet::open(root, mode);
      for (const auto& e : s->repos->catalog()) {
        if (e.repository == store::RepositoryId::Fwi) continue;
        if ((e.repository == store::RepositoryId::Single) != (mode == store::StoreMode::Single))
          throw Error(ErrorCode::InvalidArgument,
                      std::string("store was created in ") + (mode == store::StoreMode::Single ? "multi" : "single") +
                          " mode",
                      "single_mode");
      }
      const auto nodes_file = root / "nodes.json";
      if (o.nodes_json) {
        cfg.nodes = ingest::parse_node_registry_json(o.nodes_json);
        write_file(nodes_file, ingest::node_registry_to_json(cfg.nodes));
      } else if (std::filesystem::exists(nodes_file)) {
        cfg.nodes = ingest::parse_node_registry_json(read_file(nodes_file));
      } else {
        cfg.nodes = ingest::default_node_registry(5);
      }
    } else {
      s->repos = store::RepositorySet::in_memory(mode);
      cfg.nodes = o.nodes_json ? ingest::parse_node_registry_json(o.nodes_json) : ingest::default_node_registry(5);
    }

    infer::EngineOptions eo;
    eo.threads = o.threads;
    s->engine = std::make_unique<infer::InferenceEngine>(*s->repos, load_rules(o.rules_dir), eo);
    s->service = std::make_unique<service::Service>(*s->repos, *s->engine, std::move(cfg));
    *out = s.release();
  });
}

void sfwi_close(sfwi_store* store) { delete store; }

sfwi_status sfwi_request(sfwi_store* store, const char* method, const char* path, const char* query,
                         const char* body, size_t body_len, int* http_status, char** out_body) {
  return guarded([&] {
    auto& s = deref(store, "store");
    service::Request req;
    req.method = method ? method : "GET";
    req.path = need(path, "path");
    if (query && *query) {
      httplib::Params params;
      httplib::detail::parse_query_text(std::string(query), params);
      for (const auto& [k, v] : params) req.params.emplace(k, v);
    }
    if (body) req.body.assign(body, body_len);
    service::Response res = s.service->handle(req);
    if (http_status) *http_status = res.status;
    put(out_body, res.body);
  });
}

sfwi_status sfwi_ingest(sfwi_store* store, const char* property, const char* csv, size_t csv_len,
                        char** out_json) {
  return guarded([&] {
    auto& s = deref(store, "store");
    std::string_view text(need(csv, "csv"), csv_len);
    const auto& cfg = s.service->config();
    ojson out;
    if (property) {
      auto p = try_parse_property(property);
      if (!p) throw Error(ErrorCode::InvalidArgument, std::string("unknown property '") + property + "'", "property");
      out = ingest_json(service::ingest_csv(*s.repos, text, *p, cfg.nodes, cfg.clean, cfg.offset));
    } else {
      auto obs = ingest::parse_observation_csv(text, cfg.offset);
      ojson graphs = ojson::array();
      std::size_t triples = 0, observations = 0, outliers = 0;
      for (const auto& r : service::ingest_stream(*s.repos, obs, cfg.nodes, cfg.clean)) {
        graphs.push_back(ingest_json(r));
        triples += r.triples;
        observations += r.observations;
        outliers += r.outliers.size();
      }
      out = {{"graphs", graphs}, {"triples", triples}, {"observations", observations}, {"outliers_removed", outliers}};
    }
    put(out_json, out.dump() + "\n");
  });
}

sfwi_status sfwi_infer(sfwi_store* store, const char* from, const char* to, char** out_json) {
  return guarded([&] {
    auto& s = deref(store, "store");
    TimeRange r{parse_iso8601(need(from, "from")), parse_iso8601(need(to, "to"))};
    if (!r.valid()) throw Error(ErrorCode::InvalidArgument, "'from' must be earlier than 'to'", "to");
    const auto before = s.engine->rule_evaluations();
    auto events = s.engine->infer_range(r);
    ojson out{{"from", format_iso8601(r.start)},
              {"to", format_iso8601(r.end)},
              {"events", events.size()},
              {"rule_evaluations", s.engine->rule_evaluations() - before},
              {"inference_runs", s.engine->inference_runs()}};
    put(out_json, out.dump() + "\n");
  });
}

sfwi_status sfwi_rulegen(const char* grid, const char* out_dir, char** out_json) {
  return guarded([&] {
    auto spec = grid_from(grid ? grid : "default");
    auto set = ffdi::generate_rule_table(spec);
    std::filesystem::path dir(need(out_dir, "out_dir"));
    std::filesystem::create_directories(dir);
    rules::write_ruleset(set, dir);
    ojson out{{"rules", set.rules.size()},
              {"out", dir.string()},
              {"temperature_bins", spec.temperature.size() - 1},
              {"humidity_bins", spec.humidity.size() - 1},
              {"wind_bins", spec.wind.size() - 1}};
    put(out_json, out.dump() + "\n");
  });
}

void sfwi_synth_options_init(sfwi_synth_options* opts) {
  if (!opts) return;
  *opts = sfwi_synth_options{};
  opts->nodes = 5;
  opts->from = "2012-01-01T00:00:00Z";
  opts->to = "2012-02-01T00:00:00Z";
  opts->seed = 42;
  opts->fault_rate = 0.0;
  opts->utc_offset_minutes = UtcOffset{}.minutes;
}

sfwi_status sfwi_synth(const sfwi_synth_options* opts, char** out_csv, char** out_nodes_json) {
  return guarded([&] {
    const auto& o = deref(opts, "opts");
    if (!(o.fault_rate >= 0.0 && o.fault_rate <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "fault_rate must be in [0, 1]", "fault_rate");
    TimeRange r{parse_iso8601(need(o.from, "from")), parse_iso8601(need(o.to, "to"))};
    if (!r.valid()) throw Error(ErrorCode::InvalidArgument, "'from' must be earlier than 'to'", "to");
    auto nodes = ingest::default_node_registry(o.nodes);
    UtcOffset offset{o.utc_offset_minutes};
    put(out_csv, ingest::generate_synthetic_stream(nodes, r, o.seed, o.fault_rate, offset));
    put(out_nodes_json, ingest::node_registry_to_json(nodes));
  });
}

void sfwi_bench_options_init(sfwi_bench_options* opts) {
  if (!opts) return;
  *opts = sfwi_bench_options{};
  bench::BenchSpec d;
  opts->repetitions = d.repetitions;
  opts->seed = d.seed;
  opts->target_triples = d.target_triples;
  opts->nodes = d.nodes;
}

sfwi_status sfwi_bench(const sfwi_bench_options* opts, char** out_csv, char** out_json) {
  return guarded([&] {
    const auto& o = deref(opts, "opts");
    bench::BenchSpec spec;
    if (o.periods) spec.periods.assign(o.periods, o.periods + o.period_count);
    spec.repetitions = o.repetitions;
    spec.seed = o.seed;
    spec.target_triples = o.target_triples;
    spec.nodes = o.nodes;
    spec.threads = o.threads;
    spec.validate();
    auto rules = load_rules(o.rules_dir);
    bench::Progress progress;
    if (o.progress)
      progress = [&](const bench::BenchRow& row) {
        bench::BenchReport one;
        one.rows.push_back(row);
        std::string csv = one.csv();
        csv = csv.substr(csv.find('\n') + 1);
        if (!csv.empty() && csv.back() == '\n') csv.pop_back();
        o.progress(csv.c_str(), o.user);
      };
    auto report = bench::bench_run(spec, rules, progress);

    ojson orderings = ojson::array();
    for (auto period : spec.periods) {
      double nq_mr = report.row(period, "NQ-MR").median_ms, rq_mr = report.row(period, "RQ-MR").median_ms;
      double nq_1r = report.row(period, "NQ-1R").median_ms;
      orderings.push_back({{"period_seconds", period},
                           {"rq_over_nq_mr", nq_mr > 0 ? rq_mr / nq_mr : 0.0},
                           {"mr_not_slower", nq_mr <= nq_1r}});
    }
    ojson out{{"triples", report.triples},
              {"from", format_iso8601(report.dataset.start)},
              {"to", format_iso8601(report.dataset.end)},
              {"repetitions", spec.repetitions},
              {"rules", rules.rules.size()},
              {"mismatched_periods", report.mismatched_periods},
              {"periods", orderings}};
    put(out_csv, report.csv());
    put(out_json, out.dump() + "\n");
  });
}

sfwi_status sfwi_server_start(sfwi_store* store, const char* host, int port, sfwi_server** out, int* bound_port) {
  return guarded([&] {
    auto& s = deref(store, "store");
    deref(out, "out") = nullptr;
    if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidArgument, "port must be in [0, 65535]", "port");
    auto srv = std::make_unique<sfwi_server>();
    srv->http = std::make_unique<service::HttpServer>(*s.service);
    int p = srv->http->bind(host ? host : "127.0.0.1", port);
    srv->thread = std::thread([h = srv->http.get()] { h->listen(); });
    srv->http->wait_until_ready();
    if (bound_port) *bound_port = p;
    *out = srv.release();
  });
}

void sfwi_server_wait(sfwi_server* server) {
  if (server && server->thread.joinable()) server->thread.join();
}

void sfwi_server_stop(sfwi_server* server) {
  if (server) server->http->stop();
}

void sfwi_server_free(sfwi_server* server) {
  if (!server) return;
  sfwi_server_stop(server);
  sfwi_server_wait(server);
  delete server;
}

}  // extern "C"
