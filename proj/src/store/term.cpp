#include "store/term.hpp"

#include <charconv>
#include <cmath>

#include "core/error.hpp"
#include "store/vocab.hpp"

namespace sfwi::store {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    char n = s[++i];
    out += n == 'n' ? '\n' : n == 't' ? '\t' : n == 'r' ? '\r' : n;
  }
  return out;
}

}  // namespace

Term Term::iri(std::string value) {
  if (value.empty()) throw Error(ErrorCode::InvalidArgument, "IRI must not be empty");
  Term t;
  t.kind_ = TermKind::Iri;
  t.lexical_ = std::move(value);
  return t;
}

Term Term::string_literal(std::string value) {
  Term t;
  t.kind_ = TermKind::String;
  t.lexical_ = std::move(value);
  return t;
}

Term Term::decimal(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::Domain, "decimal literal must be finite");
  Term t;
  t.kind_ = TermKind::Decimal;
  t.number_ = value == 0.0 ? 0.0 : value;  // fold -0
  t.lexical_ = format_number(t.number_);
  return t;
}

Term Term::date_time(Timestamp ts) {
  Term t;
  t.kind_ = TermKind::DateTime;
  t.lexical_ = format_iso8601(ts);
  t.number_ = static_cast<double>(ts.seconds);
  return t;
}

std::optional<double> Term::numeric() const {
  if (kind_ == TermKind::Decimal || kind_ == TermKind::DateTime) return number_;
  return std::nullopt;
}

Timestamp Term::timestamp() const {
  if (kind_ != TermKind::DateTime) throw Error(ErrorCode::InvalidArgument, "term is not a dateTime literal");
  return {static_cast<std::int64_t>(number_)};
}

std::string Term::to_nt() const {
  switch (kind_) {
    case TermKind::Iri: return "<" + lexical_ + ">";
    case TermKind::String: return "\"" + escape(lexical_) + "\"";
    case TermKind::Decimal: return "\"" + lexical_ + "\"^^<" + std::string(vocab::kXsdDecimal) + ">";
    case TermKind::DateTime: return "\"" + lexical_ + "\"^^<" + std::string(vocab::kXsdDateTime) + ">";
  }
  return {};
}

Term Term::from_nt(std::string_view text) {
  if (text.size() >= 2 && text.front() == '<' && text.back() == '>')
    return iri(std::string(text.substr(1, text.size() - 2)));
  if (text.empty() || text.front() != '"') throw Error(ErrorCode::Parse, "malformed term: " + std::string(text));
  std::size_t close = std::string_view::npos;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
    } else if (text[i] == '"') {
      close = i;
      break;
    }
  }
  if (close == std::string_view::npos) throw Error(ErrorCode::Parse, "unterminated literal: " + std::string(text));
  std::string lex = unescape(text.substr(1, close - 1));
  std::string_view rest = text.substr(close + 1);
  if (rest.empty()) return string_literal(std::move(lex));
  if (!rest.starts_with("^^<") || rest.back() != '>') throw Error(ErrorCode::Parse, "malformed datatype: " + std::string(text));
  std::string_view dt = rest.substr(3, rest.size() - 4);
  if (dt == vocab::kXsdDecimal) {
    double v = 0.0;
    auto res = std::from_chars(lex.data(), lex.data() + lex.size(), v);
    if (res.ec != std::errc{} || res.ptr != lex.data() + lex.size())
      throw Error(ErrorCode::Parse, "bad decimal literal: " + lex);
    return decimal(v);
  }
  if (dt == vocab::kXsdDateTime) return date_time(parse_iso8601(lex));
  if (dt == vocab::kXsdString) return string_literal(std::move(lex));
  throw Error(ErrorCode::Parse, "unsupported datatype: " + std::string(dt));
}

std::string Dictionary::key(const Term& t) {
  std::string k;
  k.reserve(t.lexical().size() + 1);
  k += static_cast<char>('0' + static_cast<int>(t.kind()));
  k += t.lexical();
  return k;
}

TermId Dictionary::intern(const Term& term) {
  auto [it, inserted] = ids_.try_emplace(key(term), static_cast<TermId>(terms_.size()));
  if (inserted) {
    terms_.push_back(term);
    numeric_.push_back(term.numeric().value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return it->second;
}

std::optional<TermId> Dictionary::find(const Term& term) const {
  auto it = ids_.find(key(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

}  // namespace sfwi::store
