#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ingest/observation.hpp"
#include "store/graph.hpp"
#include "store/storage.hpp"
#include "store/triple_index.hpp"

namespace sfwi::store {

// The four partitions, plus the undivided repository used in single mode.
enum class RepositoryId : std::uint8_t { AirTemperature = 0, RelativeHumidity, WindSpeed, Fwi, Single };

std::string_view repository_name(RepositoryId id);
std::optional<RepositoryId> parse_repository(std::string_view name);
RepositoryId repository_for(PropertyKind p);

struct FwiTag {
  friend bool operator==(FwiTag, FwiTag) = default;
};
inline constexpr FwiTag kFwi{};

// What a catalog entry describes: one weather property, or FWI events.
using CatalogKey = std::variant<PropertyKind, FwiTag>;
std::string catalog_key_name(const CatalogKey& key);

struct CatalogEntry {
  RepositoryId repository = RepositoryId::AirTemperature;
  std::string context;
  Timestamp min_time;
  Timestamp max_time;
  CatalogKey key = PropertyKind::AirTemperature;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

enum class StoreMode { Multi, Single };

struct StoredGraph {
  std::string context;
  RepositoryId repository = RepositoryId::AirTemperature;
  std::vector<TripleId> triples;
};

// Catalog + sub-repositories of named graphs, persisted as
// <root>/catalog.tsv, <root>/<repository>.nq and <root>/coverage.tsv.
// Graph quads are appended first; the catalog rewrite (atomic rename) is the
// commit point, and quads whose context is not catalogued are ignored on load.
//
// Many readers, one writer: readers hold a ReadView, writers serialise on an
// exclusive lock.
class RepositorySet {
 public:
  explicit RepositorySet(std::unique_ptr<Storage> storage, StoreMode mode = StoreMode::Multi);
  RepositorySet(const RepositorySet&) = delete;
  RepositorySet& operator=(const RepositorySet&) = delete;

  static std::unique_ptr<RepositorySet> open(const std::filesystem::path& root, StoreMode mode = StoreMode::Multi);
  static std::unique_ptr<RepositorySet> in_memory(StoreMode mode = StoreMode::Multi);

  StoreMode mode() const noexcept { return mode_; }

  // Convert, assign a context, route by property, persist, then catalogue.
  // `batch` must already be cleaned. Returns the new context.
  std::string store_graph(std::span<const ingest::Observation> batch, PropertyKind property);

  std::vector<CatalogEntry> catalog() const;
  // Entries for `key` whose [min_time, max_time] intersects `range`.
  std::vector<CatalogEntry> catalog_lookup(const CatalogKey& key, const TimeRange& range) const;

  std::optional<NamedGraph> graph(const std::string& context) const;
  std::vector<NamedGraph> graphs(RepositoryId repository) const;
  std::size_t triple_count(RepositoryId repository) const;
  std::size_t weather_triple_count() const;

  // FWI event graphs and the coverage of materialised inference.
  // Persists `triples` as one new FWI graph (when non-empty) and replaces the
  // coverage set, atomically from the caller's view. Returns the context.
  std::optional<std::string> commit_fwi(const std::vector<Triple>& triples, Timestamp min_time,
                                        Timestamp max_time, const std::vector<TimeRange>& coverage);
  std::vector<TimeRange> coverage() const;
  // Drops every FWI graph, its catalog entries and the coverage set.
  void clear_fwi();

  class ReadView {
   public:
    const Dictionary& dictionary() const { return repos_->dictionary_; }
    const StoredGraph* find_graph(const std::string& context) const;
    // Single mode: one index over every weather triple.
    const TripleIndex& single_index() const { return repos_->single_index_; }
    // Copies the triples of `contexts` that belong to observations sampled
    // inside `ranges` (plus sensor placement triples) into `out`.
    void load_observations(std::span<const CatalogEntry> entries, std::span<const TimeRange> ranges,
                           TripleIndex& out) const;

   private:
    friend class RepositorySet;
    explicit ReadView(const RepositorySet& r) : lock_(r.mutex_), repos_(&r) {}
    std::shared_lock<std::shared_mutex> lock_;
    const RepositorySet* repos_;
  };

  ReadView read() const { return ReadView(*this); }

 private:
  void load();
  std::string next_context(std::string_view key_name, Timestamp min_time);
  std::string serialize_catalog(const std::vector<CatalogEntry>& entries) const;
  std::string serialize_quads(const std::string& context, const std::vector<TripleId>& triples) const;
  static std::string serialize_coverage(const std::vector<TimeRange>& ranges);
  void add_graph(StoredGraph g);

  std::unique_ptr<Storage> storage_;
  StoreMode mode_;
  mutable std::shared_mutex mutex_;
  Dictionary dictionary_;
  std::vector<CatalogEntry> catalog_;
  std::unordered_map<std::string, StoredGraph> graphs_;
  TripleIndex single_index_;
  std::vector<TimeRange> coverage_;
  std::uint64_t counter_ = 0;
};

}  // namespace sfwi::store
