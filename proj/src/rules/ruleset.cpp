#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "json.hpp"
#include "rules/rule.hpp"

namespace sfwi::rules {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checksum_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

namespace {

bool file_safe(const std::string& name) {
  if (name.empty() || name.front() == '.' || name.front() == '-') return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& data) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << data;
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

void RuleSet::validate() const {
  std::set<std::string> seen;
  for (const auto& r : rules) {
    if (!file_safe(r.name)) throw Error(ErrorCode::InvalidArgument, "rule name not usable as a file name: " + r.name);
    if (!seen.insert(r.name).second) throw Error(ErrorCode::InvalidArgument, "duplicate rule name: " + r.name);
    validate_rule(r);
  }
}

void write_ruleset(const RuleSet& set, const fs::path& dir) {
  set.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["metadata"] = set.metadata;
  manifest["rules"] = json::array();
  for (const auto& r : set.rules) {
    std::string text = serialize_rule(r);
    std::string file = r.name + ".rq";
    write_file(dir / file, text);
    manifest["rules"].push_back({{"name", r.name}, {"file", file}, {"checksum", checksum_hex(text)}});
  }
  // The manifest is written last; a set without one is not a rule set.
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

RuleSet read_ruleset(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(slurp(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "bad manifest.json: " + std::string(e.what()));
  }
  RuleSet set;
  try {
    if (manifest.contains("metadata")) set.metadata = manifest.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& entry : manifest.at("rules")) {
      std::string name = entry.at("name").get<std::string>();
      std::string file = entry.at("file").get<std::string>();
      if (!file_safe(file)) throw Error(ErrorCode::Parse, "bad rule file name in manifest: " + file);
      std::string text = slurp(dir / file);
      if (checksum_hex(text) != entry.at("checksum").get<std::string>())
        throw Error(ErrorCode::Parse, "checksum mismatch for " + file);
      Rule r = parse_rule(text, name);
      if (r.name != name) throw Error(ErrorCode::Parse, "rule file " + file + " names rule " + r.name);
      set.rules.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "bad manifest.json: " + std::string(e.what()));
  }
  set.validate();
  return set;
}

}  // namespace sfwi::rules
