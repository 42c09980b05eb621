#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/time.hpp"

namespace sfwi::store {

enum class TermKind : std::uint8_t { Iri = 0, String, Decimal, DateTime };

// IRI or typed literal. Identity is (kind, lexical); decimal and dateTime
// literals also carry their numeric value (epoch seconds for dateTime).
class Term {
 public:
  Term() = default;

  static Term iri(std::string value);
  static Term string_literal(std::string value);
  static Term decimal(double value);
  static Term date_time(Timestamp t);

  TermKind kind() const noexcept { return kind_; }
  const std::string& lexical() const noexcept { return lexical_; }
  bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
  bool is_literal() const noexcept { return kind_ != TermKind::Iri; }
  std::optional<double> numeric() const;
  Timestamp timestamp() const;  // DateTime only

  // N-Quads style: <iri>, "lex", "lex"^^<datatype>
  std::string to_nt() const;
  static Term from_nt(std::string_view text);

  friend bool operator==(const Term& a, const Term& b) noexcept {
    return a.kind_ == b.kind_ && a.lexical_ == b.lexical_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    return a.lexical_.compare(b.lexical_) <=> 0;
  }

 private:
  TermKind kind_ = TermKind::Iri;
  std::string lexical_;
  double number_ = std::numeric_limits<double>::quiet_NaN();
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

using TermId = std::uint32_t;
inline constexpr TermId kNoTerm = std::numeric_limits<TermId>::max();

// Interns terms to dense ids. Append-only.
class Dictionary {
 public:
  TermId intern(const Term& term);
  std::optional<TermId> find(const Term& term) const;
  const Term& term(TermId id) const { return terms_[id]; }
  // NaN for non-numeric terms.
  double numeric(TermId id) const noexcept { return numeric_[id]; }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  static std::string key(const Term& t);

  std::vector<Term> terms_;
  std::vector<double> numeric_;
  std::unordered_map<std::string, TermId> ids_;
};

struct TripleId {
  TermId s = 0;
  TermId p = 0;
  TermId o = 0;

  friend bool operator==(const TripleId&, const TripleId&) = default;
  friend auto operator<=>(const TripleId&, const TripleId&) = default;
};

struct TripleIdHash {
  std::size_t operator()(const TripleId& t) const noexcept {
    std::uint64_t h = t.s;
    h = h * 0x9E3779B97F4A7C15ULL ^ t.p;
    h = h * 0x9E3779B97F4A7C15ULL ^ t.o;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace sfwi::store
