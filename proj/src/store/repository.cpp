#include "store/repository.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "core/error.hpp"
#include "store/vocab.hpp"

namespace sfwi::store {

namespace {

constexpr const char* kCatalogFile = "catalog.tsv";
constexpr const char* kCoverageFile = "coverage.tsv";

constexpr std::array<RepositoryId, 5> kAllRepositories{RepositoryId::AirTemperature, RepositoryId::RelativeHumidity,
                                                       RepositoryId::WindSpeed, RepositoryId::Fwi,
                                                       RepositoryId::Single};

std::string file_for(RepositoryId id) { return std::string(repository_name(id)) + ".nq"; }

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') f(line, line_no);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

std::uint64_t context_counter(std::string_view context) {
  std::size_t colon = context.rfind(':');
  if (colon == std::string_view::npos) return 0;
  std::uint64_t v = 0;
  auto tail = context.substr(colon + 1);
  std::from_chars(tail.data(), tail.data() + tail.size(), v);
  return v;
}

bool inside_any(Timestamp t, std::span<const TimeRange> ranges) {
  for (const auto& r : ranges)
    if (r.contains(t)) return true;
  return false;
}

}  // namespace

std::string_view repository_name(RepositoryId id) {
  switch (id) {
    case RepositoryId::AirTemperature: return "air_temperature";
    case RepositoryId::RelativeHumidity: return "relative_humidity";
    case RepositoryId::WindSpeed: return "wind_speed";
    case RepositoryId::Fwi: return "fwi";
    case RepositoryId::Single: return "single";
  }
  return "";
}

std::optional<RepositoryId> parse_repository(std::string_view name) {
  for (RepositoryId id : kAllRepositories)
    if (repository_name(id) == name) return id;
  return std::nullopt;
}

RepositoryId repository_for(PropertyKind p) {
  switch (p) {
    case PropertyKind::AirTemperature: return RepositoryId::AirTemperature;
    case PropertyKind::RelativeHumidity: return RepositoryId::RelativeHumidity;
    case PropertyKind::WindSpeed: return RepositoryId::WindSpeed;
  }
  return RepositoryId::AirTemperature;
}

std::string catalog_key_name(const CatalogKey& key) {
  if (std::holds_alternative<FwiTag>(key)) return "fwi";
  return std::string(property_name(std::get<PropertyKind>(key)));
}

RepositorySet::RepositorySet(std::unique_ptr<Storage> storage, StoreMode mode)
    : storage_(std::move(storage)), mode_(mode) {
  load();
}

std::unique_ptr<RepositorySet> RepositorySet::open(const std::filesystem::path& root, StoreMode mode) {
  return std::make_unique<RepositorySet>(std::make_unique<DiskStorage>(root), mode);
}

std::unique_ptr<RepositorySet> RepositorySet::in_memory(StoreMode mode) {
  return std::make_unique<RepositorySet>(std::make_unique<MemoryStorage>(), mode);
}

void RepositorySet::load() {
  std::unordered_set<std::string> catalogued;
  if (auto text = storage_->read(kCatalogFile)) {
    for_each_line(*text, [&](std::string_view line, std::size_t line_no) {
      auto f = split_tabs(line);
      auto repo = f.size() == 5 ? parse_repository(f[0]) : std::nullopt;
      if (!repo) throw Error::parse("catalog.tsv: malformed entry", line_no);
      CatalogEntry e;
      e.repository = *repo;
      e.context = f[1];
      e.min_time = parse_iso8601(f[2]);
      e.max_time = parse_iso8601(f[3]);
      if (f[4] == "fwi") e.key = kFwi;
      else e.key = parse_property(f[4]);
      catalogued.insert(e.context);
      counter_ = std::max(counter_, context_counter(e.context) + 1);
      catalog_.push_back(std::move(e));
    });
  }
  std::unordered_map<std::string, RepositoryId> repo_of;
  for (const auto& e : catalog_) repo_of.emplace(e.context, e.repository);

  for (RepositoryId id : kAllRepositories) {
    auto text = storage_->read(file_for(id));
    if (!text) continue;
    for_each_line(*text, [&](std::string_view line, std::size_t line_no) {
      auto f = split_tabs(line);
      if (f.size() != 4) throw Error::parse(file_for(id) + ": expected 4 tab-separated fields", line_no);
      std::string context(f[0]);
      counter_ = std::max(counter_, context_counter(context) + 1);
      if (!catalogued.contains(context)) return;  // never committed
      TripleId t{dictionary_.intern(Term::from_nt(f[1])), dictionary_.intern(Term::from_nt(f[2])),
                 dictionary_.intern(Term::from_nt(f[3]))};
      auto [it, inserted] = graphs_.try_emplace(context);
      if (inserted) {
        it->second.context = context;
        it->second.repository = repo_of.at(context);
      }
      it->second.triples.push_back(t);
      if (it->second.repository == RepositoryId::Single) single_index_.insert(t);
    });
  }
  if (auto text = storage_->read(kCoverageFile)) {
    for_each_line(*text, [&](std::string_view line, std::size_t line_no) {
      auto f = split_tabs(line);
      if (f.size() != 2) throw Error::parse("coverage.tsv: malformed range", line_no);
      coverage_.push_back({parse_iso8601(f[0]), parse_iso8601(f[1])});
    });
  }
}

std::string RepositorySet::next_context(std::string_view key_name, Timestamp min_time) {
  return std::string(vocab::kGraphBase) + std::string(key_name) + ":" + format_iso8601(min_time) + ":" +
         std::to_string(counter_++);
}

std::string RepositorySet::serialize_catalog(const std::vector<CatalogEntry>& entries) const {
  std::string out = "# repository\tcontext\tmin_time\tmax_time\tproperty\n";
  for (const auto& e : entries) {
    out += repository_name(e.repository);
    out += '\t' + e.context + '\t' + format_iso8601(e.min_time) + '\t' + format_iso8601(e.max_time) + '\t' +
           catalog_key_name(e.key) + '\n';
  }
  return out;
}

std::string RepositorySet::serialize_quads(const std::string& context, const std::vector<TripleId>& triples) const {
  std::string out;
  out.reserve(triples.size() * 160);
  for (const auto& t : triples) {
    out += context;
    out += '\t';
    out += dictionary_.term(t.s).to_nt();
    out += '\t';
    out += dictionary_.term(t.p).to_nt();
    out += '\t';
    out += dictionary_.term(t.o).to_nt();
    out += '\n';
  }
  return out;
}

std::string RepositorySet::serialize_coverage(const std::vector<TimeRange>& ranges) {
  std::string out;
  for (const auto& r : ranges) out += format_iso8601(r.start) + '\t' + format_iso8601(r.end) + '\n';
  return out;
}

void RepositorySet::add_graph(StoredGraph g) {
  if (g.repository == RepositoryId::Single)
    for (const auto& t : g.triples) single_index_.insert(t);
  std::string context = g.context;
  graphs_.emplace(std::move(context), std::move(g));
}

std::string RepositorySet::store_graph(std::span<const ingest::Observation> batch, PropertyKind property) {
  NamedGraph g = observations_to_graph(batch);
  if (batch.front().property != property)
    throw Error(ErrorCode::InvalidArgument, "batch property does not match the target property", "property");
  auto [lo, hi] = std::minmax_element(batch.begin(), batch.end(),
                                      [](const auto& a, const auto& b) { return a.time < b.time; });

  std::unique_lock lock(mutex_);
  StoredGraph stored;
  stored.repository = mode_ == StoreMode::Single ? RepositoryId::Single : repository_for(property);
  stored.context = next_context(property_name(property), lo->time);
  stored.triples.reserve(g.triples.size());
  for (const auto& t : g.triples)
    stored.triples.push_back({dictionary_.intern(t.subject), dictionary_.intern(t.predicate), dictionary_.intern(t.object)});

  CatalogEntry entry{stored.repository, stored.context, lo->time, hi->time, property};
  std::vector<CatalogEntry> next = catalog_;
  next.push_back(entry);
  storage_->append(file_for(stored.repository), serialize_quads(stored.context, stored.triples));
  storage_->replace(kCatalogFile, serialize_catalog(next));

  catalog_ = std::move(next);
  std::string context = stored.context;
  add_graph(std::move(stored));
  return context;
}

std::vector<CatalogEntry> RepositorySet::catalog() const {
  std::shared_lock lock(mutex_);
  return catalog_;
}

std::vector<CatalogEntry> RepositorySet::catalog_lookup(const CatalogKey& key, const TimeRange& range) const {
  if (!range.valid()) throw Error(ErrorCode::InvalidArgument, "invalid time range");
  std::shared_lock lock(mutex_);
  std::vector<CatalogEntry> out;
  for (const auto& e : catalog_)
    if (e.key == key && e.min_time < range.end && range.start <= e.max_time) out.push_back(e);
  return out;
}

std::optional<NamedGraph> RepositorySet::graph(const std::string& context) const {
  std::shared_lock lock(mutex_);
  auto it = graphs_.find(context);
  if (it == graphs_.end()) return std::nullopt;
  NamedGraph g;
  g.context = context;
  g.triples.reserve(it->second.triples.size());
  for (const auto& t : it->second.triples)
    g.triples.push_back({dictionary_.term(t.s), dictionary_.term(t.p), dictionary_.term(t.o)});
  return g;
}

std::vector<NamedGraph> RepositorySet::graphs(RepositoryId repository) const {
  std::vector<std::string> contexts;
  {
    std::shared_lock lock(mutex_);
    for (const auto& e : catalog_)
      if (e.repository == repository) contexts.push_back(e.context);
  }
  std::vector<NamedGraph> out;
  for (const auto& c : contexts)
    if (auto g = graph(c)) out.push_back(std::move(*g));
  return out;
}

std::size_t RepositorySet::triple_count(RepositoryId repository) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [c, g] : graphs_)
    if (g.repository == repository) n += g.triples.size();
  return n;
}

std::size_t RepositorySet::weather_triple_count() const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [c, g] : graphs_)
    if (g.repository != RepositoryId::Fwi) n += g.triples.size();
  return n;
}

std::optional<std::string> RepositorySet::commit_fwi(const std::vector<Triple>& triples, Timestamp min_time,
                                                     Timestamp max_time, const std::vector<TimeRange>& coverage) {
  std::unique_lock lock(mutex_);
  std::optional<StoredGraph> stored;
  std::vector<CatalogEntry> next = catalog_;
  if (!triples.empty()) {
    stored.emplace();
    stored->repository = RepositoryId::Fwi;
    stored->context = next_context("fwi", min_time);
    std::unordered_set<TripleId, TripleIdHash> seen;
    for (const auto& t : triples) {
      TripleId id{dictionary_.intern(t.subject), dictionary_.intern(t.predicate), dictionary_.intern(t.object)};
      if (seen.insert(id).second) stored->triples.push_back(id);
    }
    next.push_back({RepositoryId::Fwi, stored->context, min_time, max_time, kFwi});
    storage_->append(file_for(RepositoryId::Fwi), serialize_quads(stored->context, stored->triples));
    storage_->replace(kCatalogFile, serialize_catalog(next));
  }
  storage_->replace(kCoverageFile, serialize_coverage(coverage));

  catalog_ = std::move(next);
  coverage_ = coverage;
  if (!stored) return std::nullopt;
  std::string context = stored->context;
  add_graph(std::move(*stored));
  return context;
}

std::vector<TimeRange> RepositorySet::coverage() const {
  std::shared_lock lock(mutex_);
  return coverage_;
}

void RepositorySet::clear_fwi() {
  std::unique_lock lock(mutex_);
  std::vector<CatalogEntry> next;
  for (const auto& e : catalog_)
    if (e.repository != RepositoryId::Fwi) next.push_back(e);
  storage_->replace(kCatalogFile, serialize_catalog(next));
  storage_->remove(file_for(RepositoryId::Fwi));
  storage_->remove(kCoverageFile);
  for (const auto& e : catalog_)
    if (e.repository == RepositoryId::Fwi) graphs_.erase(e.context);
  catalog_ = std::move(next);
  coverage_.clear();
}

const StoredGraph* RepositorySet::ReadView::find_graph(const std::string& context) const {
  auto it = repos_->graphs_.find(context);
  return it == repos_->graphs_.end() ? nullptr : &it->second;
}

void RepositorySet::ReadView::load_observations(std::span<const CatalogEntry> entries,
                                                std::span<const TimeRange> ranges, TripleIndex& out) const {
  const Dictionary& dict = repos_->dictionary_;
  const auto sampling = dict.find(Term::iri(vocab::sampling_time()));
  const auto platform = dict.find(Term::iri(vocab::deployed_on_platform()));
  std::unordered_set<TermId> observations;
  for (const auto& e : entries) {
    const StoredGraph* g = find_graph(e.context);
    if (!g) continue;
    bool whole = false;
    for (const auto& r : ranges)
      if (r.start <= e.min_time && e.max_time < r.end) whole = true;
    if (whole) {
      for (const auto& t : g->triples) out.insert(t);
      continue;
    }
    observations.clear();
    for (const auto& t : g->triples)
      if (sampling && t.p == *sampling &&
          inside_any({static_cast<std::int64_t>(dict.numeric(t.o))}, ranges))
        observations.insert(t.s);
    if (observations.empty()) continue;
    for (const auto& t : g->triples)
      if (observations.contains(t.s) || (platform && t.p == *platform)) out.insert(t);
  }
}

}  // namespace sfwi::store
