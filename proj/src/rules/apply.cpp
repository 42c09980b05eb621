#include <algorithm>
#include <cstdio>

#include "core/error.hpp"
#include "rules/rule.hpp"
#include "store/vocab.hpp"

namespace sfwi::rules {

std::string event_iri(std::string_view rule_name, std::string_view node_iri, std::string_view time_lexical) {
  std::string key;
  key.reserve(rule_name.size() + node_iri.size() + time_lexical.size() + 2);
  key.append(rule_name).push_back('\0');
  key.append(node_iri).push_back('\0');
  key.append(time_lexical);
  return std::string(store::vocab::kEventBase) + checksum_hex(key);
}

namespace {

Filter conjoin(const Filter& a, const Filter& b) {
  Filter out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

int require_slot(const store::CompiledBgp& bgp, const std::string& var, const std::string& rule) {
  int s = bgp.slot(var);
  if (s < 0) throw Error(ErrorCode::InvalidArgument, "rule " + rule + ": ?" + var + " is not bound in WHERE");
  return s;
}

}  // namespace

CompiledRule::CompiledRule(const Rule& rule, const store::Dictionary& dict, const store::TripleIndex& index,
                           const Filter& extra, const store::NumericIndex* numeric)
    : bgp_(rule.where, conjoin(rule.filter, extra), dict, index, numeric),
      node_slot_(require_slot(bgp_, rule.node_variable(), rule.name)),
      time_slot_(require_slot(bgp_, rule.time_variable(), rule.name)) {}

std::vector<store::Triple> apply_rule(const Rule& rule, const std::vector<store::NamedGraph>& graphs) {
  store::Dictionary dict;
  store::TripleIndex index;
  for (const auto& g : graphs)
    for (const auto& t : g.triples)
      index.insert({dict.intern(t.subject), dict.intern(t.predicate), dict.intern(t.object)});

  const store::Term located = store::Term::iri(store::vocab::at_location());
  const store::Term timed = store::Term::iri(store::vocab::at_time());
  const store::Term type = store::Term::iri(store::vocab::rdf_type());
  const store::Term cls = store::Term::iri(store::vocab::class_iri(rule.asserted_class()));

  std::vector<store::Triple> out;
  CompiledRule compiled(rule, dict, index);
  compiled.for_each_hit([&](store::TermId node, store::TermId time) {
    const store::Term& n = dict.term(node);
    const store::Term& t = dict.term(time);
    store::Term ev = store::Term::iri(event_iri(rule.name, n.lexical(), t.lexical()));
    out.push_back({ev, located, n});
    out.push_back({ev, timed, t});
    out.push_back({ev, type, cls});
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace sfwi::rules
