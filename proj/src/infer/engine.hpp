#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/fwi_class.hpp"
#include "core/time.hpp"
#include "infer/coverage.hpp"
#include "rules/rule.hpp"
#include "store/repository.hpp"

namespace sfwi::infer {

struct FwiEvent {
  std::string node_id;
  Timestamp time;
  FwiClass cls;
  std::vector<std::string> rule_names;  // rules asserting `cls` here, sorted
  Timestamp generated_at;

  friend bool operator==(const FwiEvent&, const FwiEvent&) = default;
};

struct EngineOptions {
  unsigned threads = 0;                  // 0: hardware concurrency
  std::function<Timestamp()> clock;      // generatedAtTime source; wall clock when empty
};

// Lazy, cached inference over one RepositorySet. Requests are widened to the
// slot grid; only ranges missing from the persisted coverage set are
// inferred, through a temporary working set (multi mode) or directly on the
// undivided repository with a time window on the rules (single mode).
class InferenceEngine {
 public:
  InferenceEngine(store::RepositorySet& repos, rules::RuleSet rules, EngineOptions options = {});

  // Infers whatever `req` is missing, then returns all events in `req`
  // sorted by (time, node).
  std::vector<FwiEvent> infer_range(const TimeRange& req);

  std::vector<FwiEvent> query_fwi(const TimeRange& req, const std::optional<std::set<std::string>>& nodes = {});

  // Events already materialised in `req`; never infers.
  std::vector<FwiEvent> search(const TimeRange& req) const;

  // Rule applications executed so far: one per rule per pass over a
  // working set.
  std::uint64_t rule_evaluations() const noexcept { return evaluations_.load(); }
  std::uint64_t inference_runs() const noexcept { return runs_.load(); }

  // Drops every FWI event and the coverage set.
  void reset();

  const rules::RuleSet& rules() const noexcept { return rules_; }
  store::RepositorySet& repositories() noexcept { return repos_; }

 private:
  // One resolved (node, time) outcome before persistence.
  struct Pending {
    store::Term node;
    store::Term time;
    FwiClass cls;
    std::vector<std::string> rule_names;
  };

  std::vector<Pending> evaluate(const std::vector<TimeRange>& missing);
  std::shared_ptr<const std::vector<FwiEvent>> decoded(const std::string& context) const;

  store::RepositorySet& repos_;
  rules::RuleSet rules_;
  std::vector<FwiClass> classes_;
  EngineOptions options_;
  std::mutex gate_;  // one inference at a time per repository set
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const std::vector<FwiEvent>>> cache_;
  std::atomic<std::uint64_t> evaluations_{0};
  std::atomic<std::uint64_t> runs_{0};
};

// Decodes the events stored in one FWI graph.
std::vector<FwiEvent> decode_events(const store::NamedGraph& graph);

}  // namespace sfwi::infer
