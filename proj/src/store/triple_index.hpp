#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "store/term.hpp"

namespace sfwi::store {

// Deduplicated id-triples with hash indexes on (p) and (p, o), and a dense
// per-subject index ordered by predicate that answers (s, p).
class TripleIndex {
 public:
  bool insert(TripleId t);
  bool contains(TripleId t) const;

  std::size_t size() const noexcept { return triples_.size(); }
  const std::vector<TripleId>& triples() const noexcept { return triples_; }
  const TripleId& at(std::uint32_t pos) const { return triples_[pos]; }

  std::span<const std::uint32_t> by_p(TermId p) const;
  std::span<const std::uint32_t> by_po(TermId p, TermId o) const;
  std::span<const std::uint32_t> by_sp(TermId s, TermId p) const;

  std::size_t distinct_subjects(TermId p) const;
  std::size_t distinct_objects(TermId p) const;

  void reserve(std::size_t n);

 private:
  static std::uint64_t pair_key(TermId a, TermId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

  std::vector<TripleId> triples_;
  std::unordered_set<TripleId, TripleIdHash> set_;
  std::unordered_map<TermId, std::vector<std::uint32_t>> p_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> po_;
  std::vector<std::vector<std::uint32_t>> by_s_;  // indexed by subject id, ordered by predicate
  std::unordered_map<TermId, std::size_t> distinct_s_;
  std::unordered_map<TermId, std::size_t> distinct_o_;
};

// Triples with a numeric object, sorted by value per predicate; lets a
// pattern whose object carries filter bounds scan only the matching range.
// A snapshot: rebuild after the index changes.
class NumericIndex {
 public:
  struct Entry {
    double value;
    std::uint32_t pos;  // position in the TripleIndex
  };

  NumericIndex(const Dictionary& dict, const TripleIndex& index);

  // Entries of predicate `p` with lo <= value <= hi, ascending by value.
  std::span<const Entry> range(TermId p, double lo, double hi) const;
  std::size_t count(TermId p) const;

 private:
  std::unordered_map<TermId, std::vector<Entry>> by_p_;
};

}  // namespace sfwi::store
