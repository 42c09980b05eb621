#include "store/bgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"

namespace sfwi::store {

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "=";
  }
  return "?";
}

bool compare(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
    case CompareOp::Eq: return lhs == rhs;
  }
  return false;
}

void validate_bgp(std::span<const TriplePattern> patterns, const Filter& filter) {
  std::set<std::string, std::less<>> bound;
  for (const auto& p : patterns)
    for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object})
      if (is_variable(*t)) bound.insert(variable_name(*t));
  for (const auto& c : filter)
    if (!bound.contains(c.variable))
      throw Error(ErrorCode::InvalidArgument, "filter references unbound variable ?" + c.variable, c.variable);
}

CompiledBgp::CompiledBgp(std::span<const TriplePattern> patterns, const Filter& filter, const Dictionary& dict,
                         const TripleIndex& index, const NumericIndex* numeric)
    : dict_(dict), index_(index), numeric_(numeric) {
  validate_bgp(patterns, filter);

  std::set<std::string, std::less<>> names;
  for (const auto& p : patterns)
    for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object})
      if (is_variable(*t)) names.insert(variable_name(*t));
  variables_.assign(names.begin(), names.end());

  std::set<std::string, std::less<>> filtered;
  for (const auto& c : filter) filtered.insert(c.variable);

  // Closed hull of each variable's bounds; exact strictness is left to the checks.
  std::vector<std::pair<double, double>> hull(variables_.size(),
                                              {-std::numeric_limits<double>::infinity(),
                                               std::numeric_limits<double>::infinity()});
  for (const auto& c : filter) {
    auto& h = hull[slot(c.variable)];
    if (c.op == CompareOp::Gt || c.op == CompareOp::Ge || c.op == CompareOp::Eq) h.first = std::max(h.first, c.value);
    if (c.op == CompareOp::Lt || c.op == CompareOp::Le || c.op == CompareOp::Eq) h.second = std::min(h.second, c.value);
  }

  auto to_slot = [&](const PatternTerm& t) {
    Slot s;
    if (is_variable(t)) {
      s.var = slot(variable_name(t));
    } else if (auto id = dict_.find(std::get<Term>(t))) {
      s.constant = *id;
    } else {
      unsatisfiable_ = true;
    }
    return s;
  };

  std::vector<Step> pending;
  for (const auto& p : patterns) pending.push_back({to_slot(p.subject), to_slot(p.predicate), to_slot(p.object), {}});
  if (unsatisfiable_) return;

  // Per-pattern statistics, gathered once.
  struct Stats {
    double count = 0, ds = 1, dobj = 1, po = 0, range = -1, sel = 1;
  };
  const double total = static_cast<double>(index_.size()) + 1.0;
  std::vector<Stats> stats(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const Step& st = pending[i];
    if (st.p.var >= 0) continue;
    Stats& x = stats[i];
    const TermId p = st.p.constant;
    x.count = static_cast<double>(index_.by_p(p).size());
    x.ds = std::max<double>(1.0, static_cast<double>(index_.distinct_subjects(p)));
    x.dobj = std::max<double>(1.0, static_cast<double>(index_.distinct_objects(p)));
    if (st.o.var < 0) x.po = static_cast<double>(index_.by_po(p, st.o.constant).size());
    if (st.o.var >= 0 && filtered.contains(variables_[st.o.var])) {
      const auto [lo, hi] = hull[st.o.var];
      if (numeric_ && numeric_->count(p) > 0) {
        double n = static_cast<double>(numeric_->range(p, lo, hi).size());
        x.sel = n / static_cast<double>(numeric_->count(p));
        if (st.s.var != st.o.var && (std::isfinite(lo) || std::isfinite(hi))) x.range = n;
      } else {
        x.sel = 0.5;
      }
    }
  }

  struct Estimate {
    double scanned;  // candidates visited per input row
    double out;      // matches per input row
    bool range;
  };
  auto estimate = [&](std::size_t i, const std::vector<char>& bound) -> Estimate {
    const Step& st = pending[i];
    const Stats& x = stats[i];
    auto is_bound = [&](const Slot& s) { return s.var < 0 || bound[s.var]; };
    if (st.p.var >= 0) return {total, bound[st.p.var] ? total / 2.0 : total, false};
    const bool sb = is_bound(st.s), ob = is_bound(st.o);
    Estimate e{x.count, x.count, false};
    if (sb && ob) {
      e = {std::min(x.count / x.ds, 1.0), x.count / (x.ds * x.dobj), false};
    } else if (sb) {
      e = {x.count / x.ds, x.count / x.ds, false};
    } else if (ob && st.o.var < 0) {
      e.scanned = e.out = x.po;
    } else if (ob) {
      e.scanned = e.out = x.count / x.dobj;
    } else if (x.range >= 0) {
      return {x.range, x.range, true};
    }
    if (st.o.var >= 0 && !bound[st.o.var]) e.out *= x.sel;
    return e;
  };
  auto connected = [&](std::size_t i, const std::vector<char>& bound) {
    const Step& st = pending[i];
    for (const Slot* s : {&st.s, &st.p, &st.o})
      if (s->var >= 0 && bound[s->var]) return true;
    return false;
  };
  // Marks the step's variables bound; returns how many it newly bound so the
  // caller can undo with `unbind`.
  auto bind = [&](std::size_t i, std::vector<char>& bound, int* newly) {
    const Step& st = pending[i];
    int n = 0;
    for (const Slot* s : {&st.s, &st.p, &st.o})
      if (s->var >= 0 && !bound[s->var]) {
        bound[s->var] = 1;
        newly[n++] = s->var;
      }
    return n;
  };
  auto unbind = [](std::vector<char>& bound, const int* newly, int n) {
    for (int k = 0; k < n; ++k) bound[newly[k]] = 0;
  };

  // Greedy plans from a few promising starting patterns; each next step is
  // chosen with one step of lookahead (connected steps first, then the
  // smallest product of expected matches over the next two steps). The plan
  // with the lowest estimated probe count wins.
  auto plan_from = [&](std::size_t first, std::vector<std::size_t>& order, std::vector<char>& ranged) {
    std::vector<char> used(pending.size(), 0), bound(variables_.size(), 0);
    double rows = 1.0, cost = 0.0;
    int scratch[3];
    auto take = [&](std::size_t i) {
      Estimate e = estimate(i, bound);
      cost += rows * std::max(1.0, e.scanned);
      rows *= e.out;
      ranged.push_back(e.range);
      order.push_back(i);
      used[i] = 1;
      bind(i, bound, scratch);
    };
    take(first);
    while (order.size() < pending.size()) {
      std::size_t best = 0;
      std::pair<int, double> best_key{2, 0.0};
      for (std::size_t i = 0; i < pending.size(); ++i) {
        if (used[i]) continue;
        const int group = connected(i, bound) ? 0 : 1;
        if (group > best_key.first) continue;
        double score = estimate(i, bound).out;
        int newly[3];
        int n = bind(i, bound, newly);
        double next = 1.0;
        bool any = false;
        for (std::size_t j = 0; j < pending.size(); ++j) {
          if (used[j] || j == i || !connected(j, bound)) continue;
          double o = estimate(j, bound).out;
          next = any ? std::min(next, o) : o;
          any = true;
        }
        unbind(bound, newly, n);
        score *= std::max(next, 1e-9);
        std::pair<int, double> key{group, score};
        if (key < best_key) {
          best = i;
          best_key = key;
        }
      }
      take(best);
    }
    return cost;
  };

  std::vector<std::size_t> starts(pending.size());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  {
    std::vector<char> none(variables_.size(), 0);
    std::vector<double> first_out(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) first_out[i] = estimate(i, none).out;
    std::stable_sort(starts.begin(), starts.end(),
                     [&](std::size_t a, std::size_t b) { return first_out[a] < first_out[b]; });
    if (starts.size() > 4) starts.resize(4);
  }

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_order;
  std::vector<char> best_ranged;
  for (std::size_t first : starts) {
    std::vector<std::size_t> order;
    std::vector<char> ranged;
    double cost = plan_from(first, order, ranged);
    if (cost < best_cost) {
      best_cost = cost;
      best_order = std::move(order);
      best_ranged = std::move(ranged);
    }
  }

  std::vector<char> bound(variables_.size(), 0);
  for (std::size_t k = 0; k < best_order.size(); ++k) {
    Step st = pending[best_order[k]];
    if (best_ranged[k]) {
      st.range_scan = true;
      st.lo = hull[st.o.var].first;
      st.hi = hull[st.o.var].second;
    }
    for (const Slot* s : {&st.s, &st.p, &st.o}) {
      if (s->var < 0 || bound[s->var]) continue;
      bound[s->var] = 1;
      for (const auto& c : filter)
        if (c.variable == variables_[s->var]) st.checks.push_back({s->var, c.op, c.value});
    }
    steps_.push_back(std::move(st));
  }
}

std::string CompiledBgp::explain() const {
  std::string out;
  auto name = [&](const Slot& s) {
    if (s.var >= 0) return "?" + variables_[s.var];
    return s.constant == kNoTerm ? std::string("<?>") : dict_.term(s.constant).to_nt();
  };
  for (const auto& st : steps_) {
    out += name(st.s) + " " + name(st.p) + " " + name(st.o);
    if (st.range_scan) out += "  [range]";
    for (const auto& c : st.checks) out += std::string("  ?") + variables_[c.var] + to_string(c.op) + std::to_string(c.value);
    out += "\n";
  }
  return out;
}

int CompiledBgp::slot(std::string_view name) const {
  auto it = std::lower_bound(variables_.begin(), variables_.end(), name);
  if (it == variables_.end() || *it != name) return -1;
  return static_cast<int>(it - variables_.begin());
}

void CompiledBgp::run(std::size_t depth, std::vector<TermId>& row,
                      const std::function<void(std::span<const TermId>)>& visit) const {
  if (depth == steps_.size()) {
    visit(row);
    return;
  }
  const Step& st = steps_[depth];
  auto value = [&](const Slot& s) { return s.var < 0 ? s.constant : row[s.var]; };
  const TermId s = value(st.s), p = value(st.p), o = value(st.o);

  auto try_triple = [&](const TripleId& t) {
    // Track which slots this step binds so they can be reset on backtrack.
    int newly[3];
    int n = 0;
    auto unify = [&](const Slot& sl, TermId v) {
      if (sl.var < 0) return sl.constant == v;
      TermId& cur = row[sl.var];
      if (cur == kNoTerm) {
        cur = v;
        newly[n++] = sl.var;
        return true;
      }
      return cur == v;
    };
    bool ok = unify(st.s, t.s) && unify(st.p, t.p) && unify(st.o, t.o);
    if (ok) {
      for (const Check& c : st.checks) {
        double num = dict_.numeric(row[c.var]);
        if (std::isnan(num) || !compare(num, c.op, c.value)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) run(depth + 1, row, visit);
    for (int i = 0; i < n; ++i) row[newly[i]] = kNoTerm;
  };

  if (s != kNoTerm && p != kNoTerm && o != kNoTerm) {
    if (index_.contains({s, p, o})) try_triple({s, p, o});
    return;
  }
  if (st.range_scan) {
    for (const auto& e : numeric_->range(p, st.lo, st.hi)) try_triple(index_.at(e.pos));
    return;
  }
  std::span<const std::uint32_t> candidates;
  if (s != kNoTerm && p != kNoTerm) {
    candidates = index_.by_sp(s, p);
  } else if (p != kNoTerm && o != kNoTerm) {
    candidates = index_.by_po(p, o);
  } else if (p != kNoTerm) {
    candidates = index_.by_p(p);
  } else {
    for (const TripleId& t : index_.triples()) try_triple(t);
    return;
  }
  for (std::uint32_t pos : candidates) try_triple(index_.at(pos));
}

void CompiledBgp::for_each(const std::function<void(std::span<const TermId>)>& visit) const {
  if (unsatisfiable_) return;
  std::vector<TermId> row(variables_.size(), kNoTerm);
  run(0, row, visit);
}

std::vector<std::vector<TermId>> CompiledBgp::solutions() const {
  std::vector<std::vector<TermId>> rows;
  for_each([&](std::span<const TermId> r) { rows.emplace_back(r.begin(), r.end()); });
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

std::vector<Binding> match_bgp(const std::vector<NamedGraph>& graphs, std::span<const TriplePattern> patterns,
                               const Filter& filter) {
  validate_bgp(patterns, filter);
  Dictionary dict;
  TripleIndex index;
  for (const auto& g : graphs)
    for (const auto& t : g.triples)
      index.insert({dict.intern(t.subject), dict.intern(t.predicate), dict.intern(t.object)});
  CompiledBgp bgp(patterns, filter, dict, index);
  std::vector<Binding> out;
  for (const auto& row : bgp.solutions()) {
    Binding b;
    for (std::size_t i = 0; i < row.size(); ++i) b.emplace(bgp.variables()[i], dict.term(row[i]));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace sfwi::store
