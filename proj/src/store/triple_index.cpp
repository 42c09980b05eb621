#include "store/triple_index.hpp"

#include <algorithm>
#include <cmath>

namespace sfwi::store {

bool TripleIndex::insert(TripleId t) {
  if (!set_.insert(t).second) return false;
  auto pos = static_cast<std::uint32_t>(triples_.size());
  triples_.push_back(t);
  p_[t.p].push_back(pos);
  auto& po = po_[pair_key(t.p, t.o)];
  if (po.empty()) ++distinct_o_[t.p];
  po.push_back(pos);
  if (t.s >= by_s_.size()) by_s_.resize(std::max<std::size_t>(t.s + 1, by_s_.size() * 3 / 2));
  auto& subject = by_s_[t.s];
  auto at = std::upper_bound(subject.begin(), subject.end(), t.p,
                             [&](TermId p, std::uint32_t q) { return p < triples_[q].p; });
  if (at == subject.begin() || triples_[*(at - 1)].p != t.p) ++distinct_s_[t.p];
  subject.insert(at, pos);
  return true;
}

bool TripleIndex::contains(TripleId t) const {
  auto sp = by_sp(t.s, t.p);
  if (sp.size() > 16) return set_.contains(t);
  for (std::uint32_t pos : sp)
    if (triples_[pos].o == t.o) return true;
  return false;
}

std::span<const std::uint32_t> TripleIndex::by_p(TermId p) const {
  auto it = p_.find(p);
  if (it == p_.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> TripleIndex::by_po(TermId p, TermId o) const {
  auto it = po_.find(pair_key(p, o));
  if (it == po_.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> TripleIndex::by_sp(TermId s, TermId p) const {
  if (s >= by_s_.size()) return {};
  const auto& subject = by_s_[s];
  auto first = std::lower_bound(subject.begin(), subject.end(), p,
                                [&](std::uint32_t q, TermId v) { return triples_[q].p < v; });
  auto last = first;
  while (last != subject.end() && triples_[*last].p == p) ++last;
  return {first, last};
}

std::size_t TripleIndex::distinct_subjects(TermId p) const {
  auto it = distinct_s_.find(p);
  return it == distinct_s_.end() ? 0 : it->second;
}

std::size_t TripleIndex::distinct_objects(TermId p) const {
  auto it = distinct_o_.find(p);
  return it == distinct_o_.end() ? 0 : it->second;
}

void TripleIndex::reserve(std::size_t n) {
  triples_.reserve(n);
  set_.reserve(n);
  po_.reserve(n / 2);
}

}  // namespace sfwi::store

namespace sfwi::store {

NumericIndex::NumericIndex(const Dictionary& dict, const TripleIndex& index) {
  const auto& triples = index.triples();
  for (std::uint32_t pos = 0; pos < triples.size(); ++pos) {
    double v = dict.numeric(triples[pos].o);
    if (!std::isnan(v)) by_p_[triples[pos].p].push_back({v, pos});
  }
  for (auto& [p, entries] : by_p_)
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value || (a.value == b.value && a.pos < b.pos); });
}

std::size_t NumericIndex::count(TermId p) const {
  auto it = by_p_.find(p);
  return it == by_p_.end() ? 0 : it->second.size();
}

std::span<const NumericIndex::Entry> NumericIndex::range(TermId p, double lo, double hi) const {
  auto it = by_p_.find(p);
  if (it == by_p_.end() || lo > hi) return {};
  const auto& v = it->second;
  auto first = std::lower_bound(v.begin(), v.end(), lo, [](const Entry& e, double x) { return e.value < x; });
  auto last = std::upper_bound(first, v.end(), hi, [](double x, const Entry& e) { return x < e.value; });
  return {first, last};
}

}  // namespace sfwi::store
