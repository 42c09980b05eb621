#include "infer/engine.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>
#include <unordered_map>

#include "core/error.hpp"
#include "store/vocab.hpp"

namespace sfwi::infer {

namespace {

Timestamp wall_clock() {
  auto now = std::chrono::system_clock::now().time_since_epoch();
  return {std::chrono::duration_cast<std::chrono::seconds>(now).count()};
}

bool inside_any(double t, const std::vector<TimeRange>& ranges) {
  if (!(t == t)) return false;
  Timestamp ts{static_cast<std::int64_t>(t)};
  for (const auto& r : ranges)
    if (r.contains(ts)) return true;
  return false;
}

struct Hit {
  store::TermId node;
  store::TermId time;
  std::uint32_t rule;
};

std::uint64_t pack(store::TermId node, store::TermId time) { return (std::uint64_t{node} << 32) | time; }

}  // namespace

InferenceEngine::InferenceEngine(store::RepositorySet& repos, rules::RuleSet rules, EngineOptions options)
    : repos_(repos), rules_(std::move(rules)), options_(std::move(options)) {
  rules_.validate();
  for (const auto& r : rules_.rules) classes_.push_back(r.asserted_class());
  if (!options_.clock) options_.clock = wall_clock;
  if (options_.threads == 0) options_.threads = std::max(1u, std::thread::hardware_concurrency());
}

std::vector<InferenceEngine::Pending> InferenceEngine::evaluate(const std::vector<TimeRange>& missing) {
  const bool single = repos_.mode() == store::StoreMode::Single;

  std::vector<store::CatalogEntry> entries;
  if (!single) {
    std::set<std::string> seen;
    for (PropertyKind p : kAllProperties)
      for (const auto& r : missing)
        for (auto& e : repos_.catalog_lookup(p, r))
          if (seen.insert(e.context).second) entries.push_back(std::move(e));
  }

  auto view = repos_.read();
  const store::Dictionary& dict = view.dictionary();

  // Working set: a temporary index over the catalogued graphs (multi mode),
  // or the undivided repository (single mode). The temporary index is
  // dropped on return.
  store::TripleIndex temp;
  const store::TripleIndex* index = &view.single_index();
  if (!single) {
    view.load_observations(entries, missing, temp);
    index = &temp;
  }

  // Single mode evaluates each rule once per missing range with a window on
  // the time variable; multi mode once over the whole working set.
  std::vector<std::vector<rules::Comparison>> windows;
  if (single) {
    for (const auto& r : missing)
      windows.push_back({{"", store::CompareOp::Ge, static_cast<double>(r.start.seconds)},
                         {"", store::CompareOp::Lt, static_cast<double>(r.end.seconds)}});
  } else {
    windows.push_back({});
  }

  std::vector<Hit> hits;
  if (index->size() > 0 && !rules_.rules.empty()) {
    const store::NumericIndex numeric(dict, *index);
    const std::size_t jobs = rules_.rules.size() * windows.size();
    std::atomic<std::size_t> next{0};
    std::vector<std::vector<Hit>> local(std::min<std::size_t>(options_.threads, jobs));
    std::vector<std::exception_ptr> errors(local.size());
    auto worker = [&](std::size_t w) {
      try {
        for (std::size_t job; (job = next.fetch_add(1)) < jobs;) {
          std::size_t ri = job % rules_.rules.size();
          const rules::Rule& rule = rules_.rules[ri];
          rules::Filter extra = windows[job / rules_.rules.size()];
          for (auto& c : extra) c.variable = rule.time_variable();
          rules::CompiledRule compiled(rule, dict, *index, extra, &numeric);
          compiled.for_each_hit([&](store::TermId node, store::TermId time) {
            local[w].push_back({node, time, static_cast<std::uint32_t>(ri)});
          });
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < local.size(); ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    evaluations_ += jobs;
    for (auto& l : local) hits.insert(hits.end(), l.begin(), l.end());
  }

  // Highest ordinal wins at each (node, time); ties keep every asserting rule.
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> winners;
  for (const auto& h : hits) {
    if (!inside_any(dict.numeric(h.time), missing)) continue;
    auto& w = winners[pack(h.node, h.time)];
    if (w.empty() || classes_[h.rule] > classes_[w.front()]) {
      w.assign(1, h.rule);
    } else if (classes_[h.rule] == classes_[w.front()]) {
      w.push_back(h.rule);
    }
  }

  std::vector<Pending> out;
  out.reserve(winners.size());
  for (const auto& [key, rule_ids] : winners) {
    Pending p{dict.term(static_cast<store::TermId>(key >> 32)), dict.term(static_cast<store::TermId>(key & 0xffffffffu)),
              classes_[rule_ids.front()], {}};
    for (auto id : rule_ids) p.rule_names.push_back(rules_.rules[id].name);
    std::sort(p.rule_names.begin(), p.rule_names.end());
    p.rule_names.erase(std::unique(p.rule_names.begin(), p.rule_names.end()), p.rule_names.end());
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.time, a.node) < std::tie(b.time, b.node);
  });
  return out;
}

std::vector<FwiEvent> InferenceEngine::infer_range(const TimeRange& req) {
  if (!req.valid()) throw Error(ErrorCode::InvalidArgument, "time range must satisfy from < to", "from");
  const TimeRange aligned{slot_floor(req.start), slot_ceil(req.end)};
  {
    std::lock_guard gate(gate_);
    CoverageIndex cov(repos_.coverage());
    auto missing = missing_ranges(cov, aligned);
    if (!missing.empty()) {
      ++runs_;
      auto pending = evaluate(missing);

      const store::Term located = store::Term::iri(store::vocab::at_location());
      const store::Term timed = store::Term::iri(store::vocab::at_time());
      const store::Term type = store::Term::iri(store::vocab::rdf_type());
      const store::Term generated_by = store::Term::iri(store::vocab::was_generated_by());
      const store::Term generated_at = store::Term::iri(store::vocab::generated_at_time());
      const store::Term now = store::Term::date_time(options_.clock());

      std::vector<store::Triple> triples;
      triples.reserve(pending.size() * 6);
      Timestamp min_time = aligned.end, max_time = aligned.start;
      for (const auto& p : pending) {
        store::Term ev = store::Term::iri(rules::event_iri(p.rule_names.front(), p.node.lexical(), p.time.lexical()));
        triples.push_back({ev, located, p.node});
        triples.push_back({ev, timed, p.time});
        triples.push_back({ev, type, store::Term::iri(store::vocab::class_iri(p.cls))});
        for (const auto& name : p.rule_names)
          triples.push_back({ev, generated_by, store::Term::iri(store::vocab::rule_iri(name))});
        triples.push_back({ev, generated_at, now});
        min_time = std::min(min_time, p.time.timestamp());
        max_time = std::max(max_time, p.time.timestamp());
      }
      for (const auto& r : missing) cov.add(r);
      repos_.commit_fwi(triples, min_time, max_time, cov.ranges());
    }
  }
  return search(req);
}

std::vector<FwiEvent> InferenceEngine::query_fwi(const TimeRange& req,
                                                 const std::optional<std::set<std::string>>& nodes) {
  auto events = infer_range(req);
  if (nodes) std::erase_if(events, [&](const FwiEvent& e) { return !nodes->contains(e.node_id); });
  return events;
}

std::vector<FwiEvent> InferenceEngine::search(const TimeRange& req) const {
  std::vector<FwiEvent> out;
  if (!req.valid()) return out;
  for (const auto& entry : repos_.catalog_lookup(store::kFwi, req)) {
    auto events = decoded(entry.context);
    for (const auto& e : *events)
      if (req.contains(e.time)) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const FwiEvent& a, const FwiEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.node_id != b.node_id) return a.node_id < b.node_id;
    return b.cls < a.cls;
  });
  // A retried commit can leave one (node, time) in two graphs; keep the first.
  out.erase(std::unique(out.begin(), out.end(),
                        [](const FwiEvent& a, const FwiEvent& b) { return a.time == b.time && a.node_id == b.node_id; }),
            out.end());
  return out;
}

std::shared_ptr<const std::vector<FwiEvent>> InferenceEngine::decoded(const std::string& context) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(context); it != cache_.end()) return it->second;
  }
  auto graph = repos_.graph(context);
  auto events = std::make_shared<const std::vector<FwiEvent>>(graph ? decode_events(*graph) : std::vector<FwiEvent>{});
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(context, events).first->second;
}

void InferenceEngine::reset() {
  std::lock_guard gate(gate_);
  repos_.clear_fwi();
  std::lock_guard lock(cache_mutex_);
  cache_.clear();
}

std::vector<FwiEvent> decode_events(const store::NamedGraph& graph) {
  struct Partial {
    std::optional<std::string> node;
    std::optional<Timestamp> time;
    std::optional<FwiClass> cls;
    std::vector<std::string> rules;
    Timestamp generated_at;
  };
  const std::string located = store::vocab::at_location();
  const std::string timed = store::vocab::at_time();
  const std::string type = store::vocab::rdf_type();
  const std::string generated_by = store::vocab::was_generated_by();
  const std::string generated_at = store::vocab::generated_at_time();

  std::map<std::string, Partial> by_event;
  for (const auto& t : graph.triples) {
    Partial& p = by_event[t.subject.lexical()];
    const std::string& pred = t.predicate.lexical();
    if (pred == located) p.node = store::vocab::node_id_from_iri(t.object.lexical());
    else if (pred == timed && t.object.kind() == store::TermKind::DateTime) p.time = t.object.timestamp();
    else if (pred == type) p.cls = store::vocab::class_from_iri(t.object.lexical());
    else if (pred == generated_by) p.rules.push_back(store::vocab::rule_name_from_iri(t.object.lexical()));
    else if (pred == generated_at && t.object.kind() == store::TermKind::DateTime) p.generated_at = t.object.timestamp();
  }
  std::vector<FwiEvent> out;
  for (auto& [iri, p] : by_event) {
    if (!p.node || !p.time || !p.cls) continue;
    std::sort(p.rules.begin(), p.rules.end());
    out.push_back({std::move(*p.node), *p.time, *p.cls, std::move(p.rules), p.generated_at});
  }
  std::sort(out.begin(), out.end(), [](const FwiEvent& a, const FwiEvent& b) {
    return std::tie(a.time, a.node_id) < std::tie(b.time, b.node_id);
  });
  return out;
}

}  // namespace sfwi::infer
