#include "service/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "infer/coverage.hpp"
#include "json.hpp"
#include "service/pipeline.hpp"

namespace sfwi::service {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kMaxCells = 512;
constexpr std::size_t kMaxFrames = 5000;

double r4(double v) {
  double r = std::round(v * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

std::optional<std::string> param(const std::map<std::string, std::string>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::string required(const std::map<std::string, std::string>& params, const std::string& name) {
  auto v = param(params, name);
  if (!v) throw Error(ErrorCode::InvalidArgument, "missing parameter '" + name + "'", name);
  return *v;
}

Timestamp time_param(const std::map<std::string, std::string>& params, const std::string& name) {
  std::string text = required(params, name);
  try {
    return parse_iso8601(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, "bad " + name + " timestamp '" + text + "': " + e.what(), name);
  }
}

TimeRange range_param(const std::map<std::string, std::string>& params) {
  Timestamp from = time_param(params, "from");
  Timestamp to = time_param(params, "to");
  if (!(from < to)) throw Error(ErrorCode::InvalidArgument, "'from' must be earlier than 'to'", "to");
  return {from, to};
}

int int_param(const std::map<std::string, std::string>& params, const std::string& name, int fallback, int lo,
              int hi) {
  auto v = param(params, name);
  if (!v) return fallback;
  int out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc{} || res.ptr != v->data() + v->size())
    throw Error(ErrorCode::InvalidArgument, "'" + name + "' must be an integer", name);
  if (out < lo || out > hi)
    throw Error(ErrorCode::InvalidArgument,
                "'" + name + "' must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", name);
  return out;
}

BoundingBox parse_bbox(const std::string& text) {
  double v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t end = text.find(',', pos);
    if ((i < 3) != (end != std::string::npos)) throw Error(ErrorCode::InvalidArgument, "bbox must be S,W,N,E", "bbox");
    std::string part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    auto res = std::from_chars(part.data(), part.data() + part.size(), v[i]);
    if (part.empty() || res.ec != std::errc{} || res.ptr != part.data() + part.size())
      throw Error(ErrorCode::InvalidArgument, "bbox must be S,W,N,E", "bbox");
    pos = end + 1;
  }
  BoundingBox b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) throw Error(ErrorCode::InvalidArgument, "bbox needs south < north and west < east", "bbox");
  return b;
}

BoundingBox registry_extent(const ingest::NodeRegistry& nodes) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidArgument, "bbox is required (no node registry)", "bbox");
  BoundingBox b{90, 180, -90, -180};
  for (const auto& [id, p] : nodes.nodes()) {
    b.south = std::min(b.south, p.lat_deg);
    b.north = std::max(b.north, p.lat_deg);
    b.west = std::min(b.west, p.lon_deg);
    b.east = std::max(b.east, p.lon_deg);
  }
  double pad_lat = std::max(0.005, (b.north - b.south) * 0.1);
  double pad_lon = std::max(0.005, (b.east - b.west) * 0.1);
  return {std::max(-90.0, b.south - pad_lat), std::max(-180.0, b.west - pad_lon), std::min(90.0, b.north + pad_lat),
          std::min(180.0, b.east + pad_lon)};
}

std::string clock_text(int seconds) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", seconds / 3600, seconds / 60 % 60);
  return buf;
}

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Domain:
    case ErrorCode::Parse: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Io:
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

Response json_response(const ojson& j, int status = 200) { return {status, "application/json", j.dump() + "\n"}; }

ojson event_json(const infer::FwiEvent& e) {
  return ojson{{"node", e.node_id},
               {"time", format_iso8601(e.time)},
               {"ordinal", e.cls.ordinal()},
               {"label", label(e.cls)},
               {"class", class_local_name(e.cls)},
               {"rules", e.rule_names}};
}

ojson distribution_json(const Distribution& d) {
  ojson counts = ojson::object(), pct = ojson::object();
  for (const auto& [ordinal, n] : d.counts) counts[label(FwiClass::from_ordinal(ordinal))] = n;
  for (const auto& [name, p] : d.percentages()) pct[name] = r4(p);
  return ojson{{"total", d.total}, {"counts", counts}, {"percentages", pct}};
}

std::string content_type_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

constexpr const char* kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>sfwi</title></head>\n"
    "<body><h1>sfwi</h1><p>The web UI bundle is not installed. Start the server with --ui-dir pointing at the "
    "built assets. JSON endpoints: /fwi, /fwi/timeline, /fwi/stats, /export/kml.</p></body></html>\n";

}  // namespace

std::vector<std::pair<std::string, double>> Distribution::percentages() const {
  std::vector<std::pair<std::string, double>> out;
  if (total == 0) return out;
  for (const auto& [ordinal, n] : counts)
    out.emplace_back(label(FwiClass::from_ordinal(ordinal)), 100.0 * static_cast<double>(n) / static_cast<double>(total));
  return out;
}

StatsReport compute_stats(const std::vector<infer::FwiEvent>& events, const TimeRange& range, int day_start,
                          int day_end, UtcOffset offset) {
  if (day_start < 0 || day_start >= 86400 || day_end < 0 || day_end >= 86400 || day_start == day_end)
    throw Error(ErrorCode::InvalidArgument, "day window needs distinct start and end within a day", "day_end");
  StatsReport r;
  r.range = range;
  r.day_start = day_start;
  r.day_end = day_end;
  r.offset = offset;
  for (const auto& e : events) {
    if (!range.contains(e.time)) continue;
    int sod = local_second_of_day(e.time, offset);
    bool day = day_start < day_end ? (sod >= day_start && sod < day_end) : (sod >= day_start || sod < day_end);
    Distribution& part = day ? r.day : r.night;
    ++part.counts[e.cls.ordinal()];
    ++part.total;
    ++r.entire.counts[e.cls.ordinal()];
    ++r.entire.total;
  }
  return r;
}

std::string class_color(FwiClass c) {
  static constexpr int base[5][3] = {{46, 125, 50}, {30, 136, 229}, {253, 216, 53}, {251, 140, 0}, {198, 40, 40}};
  const int* rgb = base[static_cast<int>(c.major())];
  int out[3];
  for (int i = 0; i < 3; ++i) {
    double v = rgb[i];
    if (c.sub() == Sub::Min) v = v + (255.0 - v) * 0.35;
    if (c.sub() == Sub::Max) v = v * 0.75;
    out[i] = static_cast<int>(std::lround(v));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02x%02x%02x", out[0], out[1], out[2]);
  return buf;
}

std::string events_json(const std::vector<infer::FwiEvent>& events) {
  ojson out = ojson::array();
  for (const auto& e : events) out.push_back(event_json(e));
  return out.dump() + "\n";
}

Response error_response(const std::exception& e) {
  ojson body;
  int status = 500;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    status = status_for(err->code());
    body["code"] = to_string(err->code());
    body["message"] = err->what();
    if (!err->field().empty()) body["field"] = err->field();
  } else {
    body["code"] = to_string(ErrorCode::Internal);
    body["message"] = e.what();
  }
  return json_response(body, status);
}

Service::Service(store::RepositorySet& repos, infer::InferenceEngine& engine, ServiceConfig config)
    : repos_(repos), engine_(engine), config_(std::move(config)) {
  config_.bands.validate();
  config_.idw.validate();
  config_.clean.validate();
}

Response Service::handle(const Request& req) {
  try {
    return route(req);
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

QueryRequest Service::parse_query(const std::map<std::string, std::string>& params) const {
  QueryRequest q;
  q.range = range_param(params);
  if (auto b = param(params, "bbox")) q.bbox = parse_bbox(*b);
  else q.bbox = config_.default_bbox ? *config_.default_bbox : registry_extent(config_.nodes);
  q.nx = int_param(params, "nx", config_.default_nx, 1, kMaxCells);
  q.ny = int_param(params, "ny", config_.default_ny, 1, kMaxCells);
  q.stride = int_param(params, "stride", 1, 1, 1 << 20);
  if (auto m = param(params, "mode")) {
    if (*m == "ordinal") q.mode = idw::InterpolationMode::Ordinal;
    else if (*m == "score") q.mode = idw::InterpolationMode::Score;
    else throw Error(ErrorCode::InvalidArgument, "mode must be 'ordinal' or 'score'", "mode");
  }
  if (auto n = param(params, "nodes")) {
    std::set<std::string> ids;
    std::stringstream ss(*n);
    for (std::string id; std::getline(ss, id, ',');)
      if (!id.empty()) ids.insert(id);
    q.nodes = std::move(ids);
  }
  const std::size_t slots = slots_in(q.range).size();
  if ((slots + q.stride - 1) / q.stride > kMaxFrames)
    throw Error(ErrorCode::InvalidArgument,
                "too many frames (" + std::to_string(slots) + " slots); raise 'stride'", "stride");
  return q;
}

std::vector<idw::RasterGrid> Service::frames(const QueryRequest& q, const std::vector<infer::FwiEvent>& events,
                                             std::vector<TimeRange>& gaps) const {
  std::map<Timestamp, std::vector<const infer::FwiEvent*>> by_slot;
  for (const auto& e : events) by_slot[slot_floor(e.time)].push_back(&e);

  std::vector<TimeRange> gap_slots;
  std::vector<idw::RasterGrid> out;
  const auto slots = slots_in(q.range);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto it = by_slot.find(slots[i]);
    const bool gap = it == by_slot.end();
    if (gap) gap_slots.push_back({slots[i], {slots[i].seconds + kSlotSeconds}});
    if (i % static_cast<std::size_t>(q.stride) != 0) continue;
    std::vector<idw::Sample> samples;
    if (!gap)
      for (const auto* e : it->second) {
        if (!config_.nodes.contains(e->node_id)) continue;
        double v = q.mode == idw::InterpolationMode::Ordinal ? static_cast<double>(e->cls.ordinal())
                                                             : class_mid_score(e->cls, config_.bands);
        samples.push_back({config_.nodes.at(e->node_id), v});
      }
    out.push_back(idw::raster_frame(samples, slots[i], q.bbox, q.nx, q.ny, config_.bands, config_.idw, q.mode));
  }
  gaps = infer::coalesce(std::move(gap_slots));
  return out;
}

std::string Service::fwi_json(const QueryRequest& q) {
  auto events = engine_.query_fwi(q.range, q.nodes);
  std::vector<TimeRange> gaps;
  auto grids = frames(q, events, gaps);

  ojson frames_json = ojson::array();
  for (const auto& g : grids) {
    ojson values = ojson::array(), labels = ojson::array();
    for (double v : g.values) values.push_back(r4(v));
    for (FwiClass c : g.classes) labels.push_back(label(c));
    frames_json.push_back(
        {{"timestamp", format_iso8601(g.timestamp)}, {"gap", g.gap}, {"values", values}, {"labels", labels}});
  }
  ojson events_json = ojson::array();
  for (const auto& e : events) events_json.push_back(event_json(e));
  ojson gaps_json = ojson::array();
  for (const auto& r : gaps) gaps_json.push_back({{"from", format_iso8601(r.start)}, {"to", format_iso8601(r.end)}});
  ojson legend = ojson::array();
  for (int o = 1; o <= kClassCount; ++o) {
    FwiClass c = FwiClass::from_ordinal(o);
    legend.push_back({{"ordinal", o}, {"label", label(c)}, {"color", "#" + class_color(c)}});
  }
  ojson body{{"from", format_iso8601(q.range.start)},
             {"to", format_iso8601(q.range.end)},
             {"bbox", {r4(q.bbox.south), r4(q.bbox.west), r4(q.bbox.north), r4(q.bbox.east)}},
             {"nx", q.nx},
             {"ny", q.ny},
             {"stride", q.stride},
             {"mode", q.mode == idw::InterpolationMode::Ordinal ? "ordinal" : "score"},
             {"frames", frames_json},
             {"events", events_json},
             {"gaps", gaps_json},
             {"legend", legend}};
  return body.dump() + "\n";
}

std::string Service::kml(const QueryRequest& q) {
  auto events = engine_.query_fwi(q.range, q.nodes);
  std::vector<TimeRange> gaps;
  auto grids = frames(q, events, gaps);

  std::ostringstream out;
  out.precision(10);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n<Document>\n"
      << "<name>FWI " << format_iso8601(q.range.start) << " to " << format_iso8601(q.range.end) << "</name>\n";
  for (int o = 1; o <= kClassCount; ++o) {
    std::string rgb = class_color(FwiClass::from_ordinal(o));
    // KML colours are aabbggrr.
    out << "<Style id=\"c" << o << "\"><PolyStyle><color>b4" << rgb.substr(4, 2) << rgb.substr(2, 2)
        << rgb.substr(0, 2) << "</color><outline>0</outline></PolyStyle></Style>\n";
  }
  const double dlat = (q.bbox.north - q.bbox.south) / q.ny;
  const double dlon = (q.bbox.east - q.bbox.west) / q.nx;
  for (const auto& g : grids) {
    out << "<Folder><name>" << format_iso8601(g.timestamp) << "</name><TimeSpan><begin>" << format_iso8601(g.timestamp)
        << "</begin><end>" << format_iso8601({g.timestamp.seconds + kSlotSeconds * q.stride}) << "</end></TimeSpan>\n";
    if (g.gap) {
      out << "<description>no data</description></Folder>\n";
      continue;
    }
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        FwiClass c = g.classes[static_cast<std::size_t>(iy) * g.nx + ix];
        double n = q.bbox.north - iy * dlat, s = n - dlat, w = q.bbox.west + ix * dlon, e = w + dlon;
        out << "<Placemark><name>" << label(c) << "</name><styleUrl>#c" << c.ordinal()
            << "</styleUrl><Polygon><outerBoundaryIs><LinearRing><coordinates>" << w << "," << n << ",0 " << e << ","
            << n << ",0 " << e << "," << s << ",0 " << w << "," << s << ",0 " << w << "," << n
            << ",0</coordinates></LinearRing></outerBoundaryIs></Polygon></Placemark>\n";
      }
    out << "</Folder>\n";
  }
  out << "</Document>\n</kml>\n";
  return out.str();
}

std::string Service::timeline_json(const TimeRange& range, const std::string& node) {
  if (!config_.nodes.empty() && !config_.nodes.contains(node))
    throw Error(ErrorCode::NotFound, "unknown node '" + node + "'", "node");
  ojson out = ojson::array();
  for (const auto& e : engine_.query_fwi(range, std::set<std::string>{node}))
    out.push_back({{"time", format_iso8601(e.time)}, {"ordinal", e.cls.ordinal()}, {"label", label(e.cls)}});
  return out.dump() + "\n";
}

std::string Service::stats_json(const StatsReport& r) const {
  ojson body{{"from", format_iso8601(r.range.start)},
             {"to", format_iso8601(r.range.end)},
             {"day_window",
              {{"start", clock_text(r.day_start)},
               {"end", clock_text(r.day_end)},
               {"utc_offset", format_utc_offset(r.offset)}}},
             {"entire", distribution_json(r.entire)},
             {"day", distribution_json(r.day)},
             {"night", distribution_json(r.night)}};
  return body.dump() + "\n";
}

Response Service::route(const Request& req) {
  const std::string& path = req.path;
  auto allowed = [&](const char* method) -> std::optional<Response> {
    if (req.method == method) return std::nullopt;
    Response r = error_response(Error(ErrorCode::InvalidArgument, "method " + req.method + " not allowed on " + path));
    r.status = 405;
    return r;
  };

  if (path == "/ingest") {
    if (auto r = allowed("POST")) return *r;
    PropertyKind property;
    std::string name = required(req.params, "property");
    if (auto p = try_parse_property(name)) property = *p;
    else throw Error(ErrorCode::InvalidArgument, "unknown property '" + name + "'", "property");
    auto result = ingest_csv(repos_, req.body, property, config_.nodes, config_.clean, config_.offset);
    ojson body{{"context", result.context ? ojson(*result.context) : ojson(nullptr)},
               {"triples", result.triples},
               {"observations", result.observations},
               {"outliers_removed", result.outliers.size()}};
    return json_response(body);
  }
  if (path == "/fwi") {
    if (auto r = allowed("GET")) return *r;
    return {200, "application/json", fwi_json(parse_query(req.params))};
  }
  if (path == "/export/kml") {
    if (auto r = allowed("GET")) return *r;
    return {200, "application/vnd.google-earth.kml+xml", kml(parse_query(req.params))};
  }
  if (path == "/fwi/timeline") {
    if (auto r = allowed("GET")) return *r;
    TimeRange range = range_param(req.params);
    return {200, "application/json", timeline_json(range, required(req.params, "node"))};
  }
  if (path == "/fwi/stats") {
    if (auto r = allowed("GET")) return *r;
    TimeRange range = range_param(req.params);
    auto clock = [&](const char* name, int fallback) {
      auto v = param(req.params, name);
      if (!v) return fallback;
      try {
        return parse_clock(*v);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad ") + name + ": " + e.what(), name);
      }
    };
    int start = clock("day_start", 6 * 3600);
    int end = clock("day_end", 18 * 3600);
    auto report = compute_stats(engine_.query_fwi(range), range, start, end, config_.offset);
    return {200, "application/json", stats_json(report)};
  }
  if (path == "/health") {
    if (auto r = allowed("GET")) return *r;
    return json_response({{"status", "ok"},
                          {"rules", engine_.rules().rules.size()},
                          {"rule_evaluations", engine_.rule_evaluations()},
                          {"inference_runs", engine_.inference_runs()},
                          {"weather_triples", repos_.weather_triple_count()}});
  }
  if (path == "/ui" || path.starts_with("/ui/")) {
    if (auto r = allowed("GET")) return *r;
    std::string rel = path.size() <= 4 ? std::string("index.html") : path.substr(4);
    if (rel.empty()) rel = "index.html";
    std::filesystem::path p(rel);
    for (const auto& part : p)
      if (part == "..") throw Error(ErrorCode::NotFound, "no such asset: " + rel, "path");
    if (!config_.ui_dir.empty()) {
      std::filesystem::path full = config_.ui_dir / p;
      std::ifstream in(full, std::ios::binary);
      if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return {200, content_type_for(full), ss.str()};
      }
    }
    if (rel == "index.html") return {200, "text/html; charset=utf-8", kPlaceholderPage};
    throw Error(ErrorCode::NotFound, "no such asset: " + rel, "path");
  }
  throw Error(ErrorCode::NotFound, "no route for " + path, "path");
}

}  // namespace sfwi::service
