#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ingest/clean.hpp"
#include "ingest/observation.hpp"
#include "store/repository.hpp"

namespace sfwi::service {

struct IngestResult {
  std::optional<std::string> context;  // empty when nothing survived cleaning
  std::size_t observations = 0;        // stored
  std::size_t triples = 0;             // weather triples added
  ingest::OutlierReport outliers;
};

// Cleans one single-property batch and stores it as one named graph.
IngestResult ingest_batch(store::RepositorySet& repos, const std::vector<ingest::Observation>& batch,
                          PropertyKind property, const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean);

// Parses observation CSV; every record must carry `property`.
IngestResult ingest_csv(store::RepositorySet& repos, std::string_view csv, PropertyKind property,
                        const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean, UtcOffset offset);

// Splits a mixed stream by property and into graphs spanning at most
// `graph_seconds` each (aligned to the epoch), then ingests every piece.
std::vector<IngestResult> ingest_stream(store::RepositorySet& repos, const std::vector<ingest::Observation>& obs,
                                        const ingest::NodeRegistry& nodes, const ingest::CleanConfig& clean,
                                        std::int64_t graph_seconds = 86400);

}  // namespace sfwi::service
