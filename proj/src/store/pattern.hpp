#pragma once

#include <string>
#include <variant>
#include <vector>

#include "store/term.hpp"

namespace sfwi::store {

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, Term>;

inline bool is_variable(const PatternTerm& t) { return std::holds_alternative<Variable>(t); }
inline const std::string& variable_name(const PatternTerm& t) { return std::get<Variable>(t).name; }

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class CompareOp { Lt, Le, Gt, Ge, Eq };

const char* to_string(CompareOp op);
bool compare(double lhs, CompareOp op, double rhs);

// `?var op value`. Non-numeric bindings never satisfy a comparison.
struct Comparison {
  std::string variable;
  CompareOp op = CompareOp::Eq;
  double value = 0.0;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

using Filter = std::vector<Comparison>;  // conjunction

}  // namespace sfwi::store
