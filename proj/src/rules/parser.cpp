#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "core/error.hpp"
#include "rules/rule.hpp"
#include "store/vocab.hpp"

namespace sfwi::rules {

namespace {

using store::PatternTerm;
using store::Term;
using store::Variable;

enum class Tok { Iri, PName, Var, Number, String, LBrace, RBrace, LParen, RParen, Dot, Op, And, Prefix, Construct, Where, FilterKw, A, End };

struct Token {
  Tok type = Tok::End;
  std::string text;   // IRI body, variable name, prefix, operator, string body
  std::string local;  // PName local part
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  bool in_filter = false;
  std::string rule_name;

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    switch (c) {
      case '{': advance(); t.type = Tok::LBrace; return t;
      case '}': advance(); t.type = Tok::RBrace; return t;
      case '(': advance(); t.type = Tok::LParen; return t;
      case ')': advance(); t.type = Tok::RParen; return t;
      case '.': advance(); t.type = Tok::Dot; return t;
      case '&':
        if (peek_char(1) != '&') fail("expected '&&'", t);
        advance(2);
        t.type = Tok::And;
        return t;
      case '=':
        advance(peek_char(1) == '=' ? 2 : 1);
        t.type = Tok::Op;
        t.text = "=";
        return t;
      case '>':
        t.type = Tok::Op;
        t.text = peek_char(1) == '=' ? ">=" : ">";
        advance(t.text.size());
        return t;
      case '<':
        if (peek_char(1) == '=') {
          advance(2);
          t.type = Tok::Op;
          t.text = "<=";
          return t;
        }
        if (in_filter) {
          advance();
          t.type = Tok::Op;
          t.text = "<";
          return t;
        }
        return lex_iri(t);
      case '"': return lex_string(t);
      case '?':
      case '$': return lex_var(t);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || ((c == '-' || c == '+') && is_number_start(pos_ + 1)))
      return lex_number(t);
    if (name_start(c)) return lex_name(t);
    fail(std::string("unexpected character '") + c + "'", t);
  }

  [[noreturn]] void fail(const std::string& what, const Token& at) const {
    throw Error::parse("rule syntax error at " + std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + what,
                       at.line, at.column);
  }

 private:
  char peek_char(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  bool is_number_start(std::size_t p) const {
    return p < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[p])) || text_[p] == '.');
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        std::size_t end = text_.find('\n', pos_);
        std::string_view comment = text_.substr(pos_ + 1, end == std::string_view::npos ? text_.npos : end - pos_ - 1);
        capture_name(comment);
        advance((end == std::string_view::npos ? text_.size() : end) - pos_);
      } else {
        break;
      }
    }
  }

  void capture_name(std::string_view comment) {
    while (!comment.empty() && std::isspace(static_cast<unsigned char>(comment.front()))) comment.remove_prefix(1);
    if (!comment.starts_with("rule:")) return;
    comment.remove_prefix(5);
    while (!comment.empty() && std::isspace(static_cast<unsigned char>(comment.front()))) comment.remove_prefix(1);
    while (!comment.empty() && std::isspace(static_cast<unsigned char>(comment.back()))) comment.remove_suffix(1);
    if (!comment.empty() && rule_name.empty()) rule_name = comment;
  }

  // Whitespace between a sigil and its name is tolerated ("? name", "dul: local").
  std::size_t skip_inline_space(std::size_t p) const {
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    return p;
  }

  Token lex_iri(Token t) {
    std::size_t end = pos_ + 1;
    while (end < text_.size() && text_[end] != '>') {
      if (std::isspace(static_cast<unsigned char>(text_[end])) || text_[end] == '<') fail("malformed IRI", t);
      ++end;
    }
    if (end >= text_.size()) fail("unterminated IRI", t);
    t.type = Tok::Iri;
    t.text = text_.substr(pos_ + 1, end - pos_ - 1);
    if (t.text.empty()) fail("empty IRI", t);
    advance(end + 1 - pos_);
    return t;
  }

  Token lex_string(Token t) {
    std::size_t p = pos_ + 1;
    std::string body;
    while (p < text_.size() && text_[p] != '"') {
      if (text_[p] == '\n') fail("unterminated string", t);
      if (text_[p] == '\\' && p + 1 < text_.size()) ++p;
      body += text_[p++];
    }
    if (p >= text_.size()) fail("unterminated string", t);
    t.type = Tok::String;
    t.text = std::move(body);
    advance(p + 1 - pos_);
    return t;
  }

  Token lex_var(Token t) {
    std::size_t p = skip_inline_space(pos_ + 1);
    if (p >= text_.size() || !name_char(text_[p])) fail("expected variable name", t);
    std::size_t end = p;
    while (end < text_.size() && name_char(text_[end])) ++end;
    t.type = Tok::Var;
    t.text = text_.substr(p, end - p);
    advance(end - pos_);
    return t;
  }

  Token lex_number(Token t) {
    std::size_t end = pos_;
    if (text_[end] == '+' || text_[end] == '-') ++end;
    while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) {
      // a trailing '.' not followed by a digit is a triple terminator
      if (text_[end] == '.' && !(end + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end + 1])))) break;
      ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
        end = e;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      }
    }
    std::string_view lit = text_.substr(pos_, end - pos_);
    if (!lit.empty() && lit.front() == '+') lit.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (res.ec != std::errc{} || res.ptr != lit.data() + lit.size() || !std::isfinite(v))
      fail("malformed number '" + std::string(lit) + "'", t);
    t.type = Tok::Number;
    t.number = v;
    t.text = lit;
    advance(end - pos_);
    return t;
  }

  Token lex_name(Token t) {
    std::size_t end = pos_;
    while (end < text_.size() && name_char(text_[end])) ++end;
    std::string word(text_.substr(pos_, end - pos_));
    if (end < text_.size() && text_[end] == ':') {
      std::size_t p = end + 1;
      std::size_t local_start = p;
      if (p >= text_.size() || !name_char(text_[p])) {
        std::size_t q = skip_inline_space(p);
        if (q > p && q < text_.size() && name_start(text_[q]) && !is_keyword(q)) local_start = q;
      }
      std::size_t local_end = local_start;
      while (local_end < text_.size() && name_char(text_[local_end])) ++local_end;
      t.type = Tok::PName;
      t.text = std::move(word);
      t.local = text_.substr(local_start, local_end - local_start);
      advance(local_end - pos_);
      return t;
    }
    advance(end - pos_);
    std::string kw = lower(word);
    if (kw == "prefix") t.type = Tok::Prefix;
    else if (kw == "construct") t.type = Tok::Construct;
    else if (kw == "where") t.type = Tok::Where;
    else if (kw == "filter") t.type = Tok::FilterKw;
    else if (word == "a") t.type = Tok::A;
    else fail("unexpected word '" + word + "'", t);
    return t;
  }

  bool is_keyword(std::size_t p) const {
    std::size_t end = p;
    while (end < text_.size() && name_char(text_[end])) ++end;
    std::string w = lower(text_.substr(p, end - p));
    if (end < text_.size() && text_[end] == ':') return false;
    return w == "prefix" || w == "construct" || w == "where" || w == "filter";
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  Rule parse(std::string_view default_name) {
    Rule rule;
    while (cur_.type == Tok::Prefix) {
      advance();
      if (cur_.type != Tok::PName || !cur_.local.empty()) lex_.fail("expected prefix name like 'ssn:'", cur_);
      std::string prefix = cur_.text;
      advance();
      if (cur_.type != Tok::Iri) lex_.fail("expected <IRI> after PREFIX " + prefix + ":", cur_);
      rule.prefixes[prefix] = cur_.text;
      advance();
    }
    prefixes_ = &rule.prefixes;
    expect(Tok::Construct, "CONSTRUCT");
    expect(Tok::LBrace, "'{'");
    while (cur_.type != Tok::RBrace) rule.construct.push_back(triple());
    advance();
    expect(Tok::Where, "WHERE");
    expect(Tok::LBrace, "'{'");
    while (cur_.type != Tok::RBrace) {
      if (cur_.type == Tok::FilterKw) {
        filter(rule.filter);
      } else {
        rule.where.push_back(triple());
      }
    }
    advance();
    if (cur_.type != Tok::End) lex_.fail("unexpected content after WHERE block", cur_);
    rule.name = lex_.rule_name.empty() ? std::string(default_name) : lex_.rule_name;
    return rule;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Tok type, const char* what) {
    if (cur_.type != type) lex_.fail(std::string("expected ") + what, cur_);
    advance();
  }

  TriplePattern triple() {
    TriplePattern t;
    t.subject = term(false);
    t.predicate = term(true);
    t.object = term(false);
    if (cur_.type == Tok::Dot) advance();
    return t;
  }

  PatternTerm term(bool predicate) {
    Token t = cur_;
    switch (t.type) {
      case Tok::Var: advance(); return Variable{t.text};
      case Tok::Iri: advance(); return Term::iri(t.text);
      case Tok::PName: {
        advance();
        return Term::iri(expand(t));
      }
      case Tok::A:
        if (!predicate) lex_.fail("'a' is only valid as a predicate", t);
        advance();
        return Term::iri(store::vocab::rdf_type());
      case Tok::Number:
        if (predicate) lex_.fail("literal in predicate position", t);
        advance();
        return Term::decimal(t.number);
      case Tok::String:
        if (predicate) lex_.fail("literal in predicate position", t);
        advance();
        return Term::string_literal(t.text);
      default: lex_.fail("expected a term", t);
    }
  }

  std::string expand(const Token& t) const {
    if (auto it = prefixes_->find(t.text); it != prefixes_->end()) return it->second + t.local;
    const auto& defaults = store::vocab::default_prefixes();
    if (auto it = defaults.find(t.text); it != defaults.end()) return it->second + t.local;
    lex_.fail("unknown prefix '" + t.text + ":'", t);
  }

  void filter(Filter& out) {
    advance();  // FILTER
    lex_.in_filter = true;
    if (cur_.type != Tok::LParen) lex_.fail("expected '(' after FILTER", cur_);
    advance();
    while (true) {
      out.push_back(comparison());
      if (cur_.type == Tok::And) {
        advance();
        continue;
      }
      break;
    }
    lex_.in_filter = false;
    if (cur_.type != Tok::RParen) lex_.fail("expected ')' or '&&' in FILTER", cur_);
    advance();
  }

  static store::CompareOp op_from(const std::string& s) {
    using store::CompareOp;
    if (s == "<") return CompareOp::Lt;
    if (s == "<=") return CompareOp::Le;
    if (s == ">") return CompareOp::Gt;
    if (s == ">=") return CompareOp::Ge;
    return CompareOp::Eq;
  }

  static store::CompareOp flip(store::CompareOp op) {
    using store::CompareOp;
    switch (op) {
      case CompareOp::Lt: return CompareOp::Gt;
      case CompareOp::Le: return CompareOp::Ge;
      case CompareOp::Gt: return CompareOp::Lt;
      case CompareOp::Ge: return CompareOp::Le;
      case CompareOp::Eq: return CompareOp::Eq;
    }
    return op;
  }

  Comparison comparison() {
    Token lhs = cur_;
    advance();
    Token op = cur_;
    if (op.type != Tok::Op) lex_.fail("expected comparison operator", op);
    advance();
    Token rhs = cur_;
    advance();
    if (lhs.type == Tok::Var && rhs.type == Tok::Number) return {lhs.text, op_from(op.text), rhs.number};
    if (lhs.type == Tok::Number && rhs.type == Tok::Var) return {rhs.text, flip(op_from(op.text)), lhs.number};
    lex_.fail("comparison must relate a variable and a numeric constant", lhs);
  }

  Lexer lex_;
  Token cur_;
  const std::map<std::string, std::string>* prefixes_ = nullptr;
};

std::set<std::string> pattern_variables(const std::vector<TriplePattern>& patterns) {
  std::set<std::string> out;
  for (const auto& p : patterns)
    for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object})
      if (store::is_variable(*t)) out.insert(store::variable_name(*t));
  return out;
}

[[noreturn]] void semantic_error(const std::string& rule, const std::string& what) {
  throw Error::parse("rule '" + rule + "': " + what, 0);
}

// Identifies the fresh event variable and checks the CONSTRUCT head is the
// closed event shape.
std::string resolve_event_variable(const Rule& rule, const std::set<std::string>& where_vars) {
  const std::string at_location = store::vocab::at_location();
  const std::string at_time = store::vocab::at_time();
  auto iri_is = [](const PatternTerm& t, const std::string& iri) {
    return !store::is_variable(t) && std::get<Term>(t).is_iri() && std::get<Term>(t).lexical() == iri;
  };

  std::set<std::string> candidates;
  for (const auto& v : pattern_variables(rule.construct))
    if (!where_vars.contains(v)) candidates.insert(v);

  std::string event;
  for (const auto& v : candidates) {
    bool located = false, timed = false;
    for (const auto& t : rule.construct) {
      if (!store::is_variable(t.subject) || store::variable_name(t.subject) != v) continue;
      bool object_bound = store::is_variable(t.object) && where_vars.contains(store::variable_name(t.object));
      if (iri_is(t.predicate, at_location) && object_bound) located = true;
      if (iri_is(t.predicate, at_time) && object_bound) timed = true;
    }
    if (!located || !timed || !event.empty()) semantic_error(rule.name, "unbound variable ?" + v + " in CONSTRUCT");
    event = v;
  }
  if (event.empty()) semantic_error(rule.name, "CONSTRUCT must mint a fresh event variable");
  return event;
}

}  // namespace

std::map<std::string, Interval> filter_intervals(const Filter& filter) {
  std::map<std::string, Interval> out;
  for (const auto& c : filter) {
    Interval& iv = out[c.variable];
    auto raise_lo = [&](double v, bool closed) {
      if (v > iv.lo || (v == iv.lo && !closed)) {
        iv.lo = v;
        iv.lo_closed = closed;
      }
    };
    auto lower_hi = [&](double v, bool closed) {
      if (v < iv.hi || (v == iv.hi && !closed)) {
        iv.hi = v;
        iv.hi_closed = closed;
      }
    };
    switch (c.op) {
      case store::CompareOp::Gt: raise_lo(c.value, false); break;
      case store::CompareOp::Ge: raise_lo(c.value, true); break;
      case store::CompareOp::Lt: lower_hi(c.value, false); break;
      case store::CompareOp::Le: lower_hi(c.value, true); break;
      case store::CompareOp::Eq:
        raise_lo(c.value, true);
        lower_hi(c.value, true);
        break;
    }
  }
  return out;
}

void validate_rule(const Rule& rule) {
  if (rule.name.empty()) semantic_error(rule.name, "rule name must not be empty");
  const auto where_vars = pattern_variables(rule.where);
  for (const auto& c : rule.filter) {
    if (!where_vars.contains(c.variable)) semantic_error(rule.name, "unbound variable ?" + c.variable + " in FILTER");
    if (!std::isfinite(c.value)) semantic_error(rule.name, "filter constants must be finite");
  }
  for (const auto& [var, iv] : filter_intervals(rule.filter))
    if (iv.empty()) semantic_error(rule.name, "contradictory bounds on ?" + var + " (empty interval)");

  std::string event = resolve_event_variable(rule, where_vars);
  if (!rule.event_variable.empty() && rule.event_variable != event)
    semantic_error(rule.name, "event variable mismatch");

  // Closed head: exactly atLocation, atTime and rdf:type on the event.
  if (rule.construct.size() != 3) semantic_error(rule.name, "CONSTRUCT must hold exactly the three event triples");
  std::set<std::string> predicates;
  for (const auto& t : rule.construct) {
    if (!store::is_variable(t.subject) || store::variable_name(t.subject) != event)
      semantic_error(rule.name, "every CONSTRUCT triple must describe the event ?" + event);
    if (store::is_variable(t.predicate)) semantic_error(rule.name, "variable predicate in CONSTRUCT");
    predicates.insert(std::get<store::Term>(t.predicate).lexical());
  }
  if (predicates != std::set<std::string>{store::vocab::at_location(), store::vocab::at_time(), store::vocab::rdf_type()})
    semantic_error(rule.name, "CONSTRUCT must use prov:atLocation, prov:atTime and rdf:type");
  Rule probe = rule;
  probe.event_variable = event;
  (void)probe.asserted_class();
}

Rule parse_rule(std::string_view text, std::string_view default_name) {
  Parser parser(text);
  Rule rule = parser.parse(default_name);
  validate_rule(rule);
  rule.event_variable = resolve_event_variable(rule, pattern_variables(rule.where));
  return rule;
}

std::vector<Rule> parse_rules(std::string_view text, std::string_view default_name) {
  std::vector<Rule> out;
  std::size_t pos = 0;
  std::string chunk;
  std::size_t index = 0;
  auto flush = [&] {
    bool blank = true;
    for (char c : chunk)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) out.push_back(parse_rule(chunk, std::string(default_name) + "_" + std::to_string(index++)));
    chunk.clear();
  };
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    std::string_view trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.remove_suffix(1);
    if (trimmed == "---") flush();
    else {
      chunk += line;
      chunk += '\n';
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  return out;
}

std::string Rule::node_variable() const {
  for (const auto& t : construct)
    if (!store::is_variable(t.predicate) && std::get<store::Term>(t.predicate).lexical() == store::vocab::at_location() &&
        store::is_variable(t.object))
      return store::variable_name(t.object);
  throw Error(ErrorCode::InvalidArgument, "rule " + name + " has no atLocation template");
}

std::string Rule::time_variable() const {
  for (const auto& t : construct)
    if (!store::is_variable(t.predicate) && std::get<store::Term>(t.predicate).lexical() == store::vocab::at_time() &&
        store::is_variable(t.object))
      return store::variable_name(t.object);
  throw Error(ErrorCode::InvalidArgument, "rule " + name + " has no atTime template");
}

FwiClass Rule::asserted_class() const {
  for (const auto& t : construct) {
    if (store::is_variable(t.predicate) || std::get<store::Term>(t.predicate).lexical() != store::vocab::rdf_type())
      continue;
    if (!store::is_variable(t.object))
      if (auto c = store::vocab::class_from_iri(std::get<store::Term>(t.object).lexical())) return *c;
    semantic_error(name, "rdf:type must name one of the fwi: classes");
  }
  semantic_error(name, "CONSTRUCT has no rdf:type template");
}

}  // namespace sfwi::rules
