#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "store/graph.hpp"
#include "store/pattern.hpp"
#include "store/triple_index.hpp"

namespace sfwi::store {

// Throws InvalidArgument when a filter names a variable no pattern binds.
void validate_bgp(std::span<const TriplePattern> patterns, const Filter& filter);

// A basic graph pattern planned against one index: left-deep nested-loop
// join, patterns ordered greedily by estimated cardinality, comparisons
// checked as soon as their variable is bound. With a NumericIndex, a pattern
// whose object variable is bounded by the filter scans only that value range.
class CompiledBgp {
 public:
  CompiledBgp(std::span<const TriplePattern> patterns, const Filter& filter, const Dictionary& dict,
              const TripleIndex& index, const NumericIndex* numeric = nullptr);

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  // Slot of a variable in the binding rows, or -1.
  int slot(std::string_view name) const;

  // Calls `visit` once per solution with one TermId per variable slot.
  void for_each(const std::function<void(std::span<const TermId>)>& visit) const;

  // One line per join step in execution order.
  std::string explain() const;

  // Sorted, duplicate-free solution rows.
  std::vector<std::vector<TermId>> solutions() const;

 private:
  struct Slot {
    int var = -1;            // variable slot, or -1 for a constant
    TermId constant = kNoTerm;
  };
  struct Check {
    int var;
    CompareOp op;
    double value;
  };
  struct Step {
    Slot s, p, o;
    std::vector<Check> checks;  // comparisons whose variable this step binds
    bool range_scan = false;    // scan numeric objects in [lo, hi]
    double lo = 0.0, hi = 0.0;
  };

  void run(std::size_t depth, std::vector<TermId>& row, const std::function<void(std::span<const TermId>)>& visit) const;

  const Dictionary& dict_;
  const TripleIndex& index_;
  const NumericIndex* numeric_;
  std::vector<std::string> variables_;
  std::vector<Step> steps_;
  bool unsatisfiable_ = false;
};

using Binding = std::map<std::string, Term>;

// Evaluates over the union of `graphs` with set semantics.
std::vector<Binding> match_bgp(const std::vector<NamedGraph>& graphs, std::span<const TriplePattern> patterns,
                               const Filter& filter);

}  // namespace sfwi::store
