#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

#include "core/error.hpp"
#include "rules/rule.hpp"
#include "store/vocab.hpp"

namespace sfwi::rules {

namespace {

bool valid_local(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

std::string number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

class Printer {
 public:
  explicit Printer(const Rule& rule) {
    for (const auto& [name, base] : store::vocab::default_prefixes()) namespaces_[name] = base;
    for (const auto& [name, base] : rule.prefixes) namespaces_[name] = base;
  }

  std::string iri(const std::string& value) const {
    if (value == store::vocab::rdf_type()) return "a";
    const std::string* best_name = nullptr;
    std::size_t best_len = 0;
    for (const auto& [name, base] : namespaces_) {
      if (base.size() > best_len && value.size() > base.size() && value.compare(0, base.size(), base) == 0 &&
          valid_local(std::string_view(value).substr(base.size()))) {
        best_name = &name;
        best_len = base.size();
      }
    }
    if (best_name) return *best_name + ":" + value.substr(best_len);
    return "<" + value + ">";
  }

  std::string term(const store::PatternTerm& t) const {
    if (store::is_variable(t)) return "?" + store::variable_name(t);
    const auto& v = std::get<store::Term>(t);
    switch (v.kind()) {
      case store::TermKind::Iri: return iri(v.lexical());
      case store::TermKind::Decimal: return v.lexical();
      case store::TermKind::String: {
        std::string out = "\"";
        for (char c : v.lexical()) {
          if (c == '"' || c == '\\') out += '\\';
          out += c;
        }
        return out + "\"";
      }
      case store::TermKind::DateTime: break;
    }
    throw Error(ErrorCode::InvalidArgument, "dateTime constants cannot appear in rule text");
  }

 private:
  std::map<std::string, std::string> namespaces_;
};

}  // namespace

std::string serialize_rule(const Rule& rule) {
  Printer pr(rule);
  std::ostringstream out;
  out << "# rule: " << rule.name << "\n";
  for (const auto& [name, base] : rule.prefixes) out << "PREFIX " << name << ": <" << base << ">\n";
  out << "CONSTRUCT {\n";
  for (const auto& t : rule.construct)
    out << "  " << pr.term(t.subject) << " " << pr.term(t.predicate) << " " << pr.term(t.object) << " .\n";
  out << "}\nWHERE {\n";
  for (const auto& t : rule.where)
    out << "  " << pr.term(t.subject) << " " << pr.term(t.predicate) << " " << pr.term(t.object) << " .\n";
  if (!rule.filter.empty()) {
    out << "  FILTER(";
    for (std::size_t i = 0; i < rule.filter.size(); ++i) {
      const auto& c = rule.filter[i];
      if (i) out << " && ";
      out << "?" << c.variable << " " << store::to_string(c.op) << " " << number(c.value);
    }
    out << ")\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace sfwi::rules
