#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/fwi_class.hpp"
#include "core/geo.hpp"
#include "core/time.hpp"
#include "idw/idw.hpp"
#include "infer/engine.hpp"
#include "ingest/clean.hpp"
#include "ingest/observation.hpp"
#include "store/repository.hpp"

namespace sfwi::service {

struct Request {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceConfig {
  ingest::NodeRegistry nodes;
  UtcOffset offset;
  ClassBands bands;
  idw::IdwConfig idw;
  ingest::CleanConfig clean;
  std::optional<BoundingBox> default_bbox;  // registry extent (padded) when unset
  int default_nx = 32;
  int default_ny = 32;
  std::filesystem::path ui_dir;             // static assets served under /ui
};

// Parsed and validated /fwi parameters.
struct QueryRequest {
  TimeRange range;
  BoundingBox bbox;
  int nx = 32;
  int ny = 32;
  int stride = 1;
  idw::InterpolationMode mode = idw::InterpolationMode::Ordinal;
  std::optional<std::set<std::string>> nodes;
};

struct Distribution {
  std::map<int, std::size_t> counts;  // by class ordinal
  std::size_t total = 0;

  // Share per label in percent, canonical label order.
  std::vector<std::pair<std::string, double>> percentages() const;
};

struct StatsReport {
  TimeRange range;
  int day_start = 6 * 3600;  // seconds after local midnight
  int day_end = 18 * 3600;
  UtcOffset offset;
  Distribution entire, day, night;
};

// Day = local time of day in [day_start, day_end), wrapping past midnight
// when day_start > day_end.
StatsReport compute_stats(const std::vector<infer::FwiEvent>& events, const TimeRange& range, int day_start,
                          int day_end, UtcOffset offset);

// Fill colour per class as "rrggbb": one hue per major class, lighter for
// Min and darker for Max.
std::string class_color(FwiClass c);

// HTTP-shaped facade over one repository set and its inference engine.
// Thread-safe; concurrency is delegated to the store and the engine.
class Service {
 public:
  Service(store::RepositorySet& repos, infer::InferenceEngine& engine, ServiceConfig config);

  Response handle(const Request& req);

  const ServiceConfig& config() const noexcept { return config_; }
  QueryRequest parse_query(const std::map<std::string, std::string>& params) const;

  std::string fwi_json(const QueryRequest& q);
  std::string kml(const QueryRequest& q);
  std::string timeline_json(const TimeRange& range, const std::string& node);
  std::string stats_json(const StatsReport& report) const;

 private:
  Response route(const Request& req);
  std::vector<idw::RasterGrid> frames(const QueryRequest& q, const std::vector<infer::FwiEvent>& events,
                                      std::vector<TimeRange>& gaps) const;

  store::RepositorySet& repos_;
  infer::InferenceEngine& engine_;
  ServiceConfig config_;
};

// Event list as served under "events" in /fwi.
std::string events_json(const std::vector<infer::FwiEvent>& events);

// Maps an error to its HTTP status and {code, message, field} body.
Response error_response(const std::exception& e);

}  // namespace sfwi::service
