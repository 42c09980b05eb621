#include "service/pipeline.hpp"

#include <map>

#include "core/error.hpp"

namespace sfwi::service {

IngestResult ingest_batch(store::RepositorySet& repos, const std::vector<ingest::Observation>& batch,
                          PropertyKind property, const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean) {
  for (const auto& o : batch)
    if (o.property != property)
      throw Error(ErrorCode::InvalidArgument,
                  "record for " + std::string(property_name(o.property)) + " in a " +
                      std::string(property_name(property)) + " batch",
                  "property");
  IngestResult result;
  auto cleaned = ingest::clean_stream(batch, nodes, clean);
  result.outliers = std::move(cleaned.report);
  if (cleaned.clean.empty()) return result;
  const std::size_t before = repos.weather_triple_count();
  result.context = repos.store_graph(cleaned.clean, property);
  result.observations = cleaned.clean.size();
  result.triples = repos.weather_triple_count() - before;
  return result;
}

IngestResult ingest_csv(store::RepositorySet& repos, std::string_view csv, PropertyKind property,
                        const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean, UtcOffset offset) {
  return ingest_batch(repos, ingest::parse_observation_csv(csv, offset), property, nodes, clean);
}

std::vector<IngestResult> ingest_stream(store::RepositorySet& repos, const std::vector<ingest::Observation>& obs,
                                        const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean,
                                        std::int64_t graph_seconds) {
  if (graph_seconds <= 0) throw Error(ErrorCode::InvalidArgument, "graph span must be positive");
  std::map<std::pair<int, std::int64_t>, std::vector<ingest::Observation>> pieces;
  for (const auto& o : obs) {
    std::int64_t bucket = o.time.seconds / graph_seconds - (o.time.seconds % graph_seconds < 0 ? 1 : 0);
    pieces[{static_cast<int>(o.property), bucket}].push_back(o);
  }
  std::vector<IngestResult> out;
  for (auto& [key, batch] : pieces)
    out.push_back(ingest_batch(repos, batch, static_cast<PropertyKind>(key.first), nodes, clean));
  return out;
}

}  // namespace sfwi::service
