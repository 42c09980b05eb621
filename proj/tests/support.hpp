#include <unistd.h>
#include <algorithm>
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/time.hpp"
#include "ingest/observation.hpp"
#include "store/pattern.hpp"
#include "store/storage.hpp"
#include "store/term.hpp"

namespace sfwi::test {

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) { return read_text(std::filesystem::path(SFWI_FIXTURES) / name); }

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("sfwi-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

// Memory storage whose writes fail while `fail_on(name)` says so.
class FaultyStorage : public store::Storage {
 public:
  std::function<bool(const std::string&)> fail_on = [](const std::string&) { return false; };

  std::optional<std::string> read(const std::string& name) const override { return inner_.read(name); }
  void append(const std::string& name, std::string_view data) override {
    if (fail_on(name)) throw Error(ErrorCode::Io, "injected append failure: " + name);
    inner_.append(name, data);
  }
  void replace(const std::string& name, std::string_view data) override {
    if (fail_on(name)) throw Error(ErrorCode::Io, "injected replace failure: " + name);
    inner_.replace(name, data);
  }
  void remove(const std::string& name) override { inner_.remove(name); }

 private:
  store::MemoryStorage inner_;
};

// The three readings at node 1 that the High example works through.
inline std::vector<ingest::Observation> worked_example_observations() {
  const Timestamp t = from_civil(2012, 1, 2, 12, 0, 0);
  return {
      {t, PropertyKind::RelativeHumidity, "RH_1", "SN_1", 85.0, "%"},
      {t, PropertyKind::WindSpeed, "WS_1", "SN_1", 23.3, "m/s"},
      {t, PropertyKind::AirTemperature, "AT_1", "SN_1", 40.0, "\xC2\xB0" "C"},
  };
}

// Naive evaluation: patterns joined in textual order by scanning every
// triple, the filter checked only on complete assignments.
inline std::vector<std::map<std::string, store::Term>> naive_match(const std::vector<store::Triple>& data,
                                                                  const std::vector<store::TriplePattern>& patterns,
                                                                  const store::Filter& filter) {
  using Binding = std::map<std::string, store::Term>;
  std::vector<Binding> out;
  std::function<void(std::size_t, Binding&)> rec = [&](std::size_t i, Binding& b) {
    if (i == patterns.size()) {
      for (const auto& c : filter) {
        auto it = b.find(c.variable);
        if (it == b.end()) return;
        auto v = it->second.numeric();
        if (!v || !store::compare(*v, c.op, c.value)) return;
      }
      out.push_back(b);
      return;
    }
    const auto& p = patterns[i];
    for (const auto& t : data) {
      Binding next = b;
      bool ok = true;
      auto unify = [&](const store::PatternTerm& pt, const store::Term& value) {
        if (!ok) return;
        if (store::is_variable(pt)) {
          auto [it, fresh] = next.emplace(store::variable_name(pt), value);
          if (!fresh && !(it->second == value)) ok = false;
        } else if (!(std::get<store::Term>(pt) == value)) {
          ok = false;
        }
      };
      unify(p.subject, t.subject);
      unify(p.predicate, t.predicate);
      unify(p.object, t.object);
      if (ok) rec(i + 1, next);
    }
  };
  Binding b;
  rec(0, b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace sfwi::test
