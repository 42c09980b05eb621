#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/fwi_class.hpp"
#include "store/bgp.hpp"
#include "store/graph.hpp"
#include "store/pattern.hpp"

namespace sfwi::rules {

using store::Comparison;
using store::Filter;
using store::TriplePattern;

// A CONSTRUCT rule: basic graph pattern + conjunctive numeric filter, whose
// head asserts one FWI event (atLocation, atTime, rdf:type) per solution.
struct Rule {
  std::string name;
  std::map<std::string, std::string> prefixes;  // declared PREFIXes only
  std::vector<TriplePattern> construct;
  std::vector<TriplePattern> where;
  Filter filter;
  std::string event_variable;  // construct-only variable minted per solution

  std::string node_variable() const;  // object of the atLocation template
  std::string time_variable() const;  // object of the atTime template
  FwiClass asserted_class() const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const {
    return (lo_closed ? v >= lo : v > lo) && (hi_closed ? v <= hi : v < hi);
  }
  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

// Per-variable intersection of the filter's comparisons.
std::map<std::string, Interval> filter_intervals(const Filter& filter);

// Throws Error(Parse) with 1-based line/column on syntax errors, and on
// unbound variables, contradictory bounds or an unsupported CONSTRUCT shape.
// A "# rule: <name>" comment names the rule; otherwise `default_name` is used.
Rule parse_rule(std::string_view text, std::string_view default_name = "rule");

// Rules separated by lines consisting of "---".
std::vector<Rule> parse_rules(std::string_view text, std::string_view default_name = "rule");

// Canonical text; parse_rule(serialize_rule(r)) == r.
std::string serialize_rule(const Rule& rule);

void validate_rule(const Rule& rule);

// Deterministic event IRI from (rule name, node IRI, time lexical form).
std::string event_iri(std::string_view rule_name, std::string_view node_iri, std::string_view time_lexical);

// Instantiates the CONSTRUCT templates for every solution over the union of
// `graphs`; sorted and duplicate-free.
std::vector<store::Triple> apply_rule(const Rule& rule, const std::vector<store::NamedGraph>& graphs);

// A rule planned against one index. `extra` comparisons (e.g. a time window
// on the time variable) are conjoined with the rule's own filter.
class CompiledRule {
 public:
  CompiledRule(const Rule& rule, const store::Dictionary& dict, const store::TripleIndex& index,
               const Filter& extra = {}, const store::NumericIndex* numeric = nullptr);

  const store::CompiledBgp& bgp() const noexcept { return bgp_; }

  // Calls `hit(node, time)` for every solution.
  template <class F>
  void for_each_hit(F&& hit) const {
    bgp_.for_each([&](std::span<const store::TermId> row) { hit(row[node_slot_], row[time_slot_]); });
  }

 private:
  store::CompiledBgp bgp_;
  int node_slot_;
  int time_slot_;
};

struct RuleSet {
  std::vector<Rule> rules;
  std::map<std::string, std::string> metadata;

  void validate() const;  // unique names
};

std::uint64_t fnv1a64(std::string_view data);
std::string checksum_hex(std::string_view data);

// One "<name>.rq" file per rule plus manifest.json ({name, file, checksum}
// per rule and the metadata map).
void write_ruleset(const RuleSet& set, const std::filesystem::path& dir);
RuleSet read_ruleset(const std::filesystem::path& dir);

}  // namespace sfwi::rules
