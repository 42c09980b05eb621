#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace sfwi::store {

// Named byte files. `replace` is atomic with respect to readers of the file.
class Storage {
 public:
  virtual ~Storage() = default;
  virtual std::optional<std::string> read(const std::string& name) const = 0;
  virtual void append(const std::string& name, std::string_view data) = 0;
  virtual void replace(const std::string& name, std::string_view data) = 0;
  virtual void remove(const std::string& name) = 0;
};

// Files under `root`; replace() writes `<name>.tmp` then renames it over.
class DiskStorage : public Storage {
 public:
  explicit DiskStorage(std::filesystem::path root);

  std::optional<std::string> read(const std::string& name) const override;
  void append(const std::string& name, std::string_view data) override;
  void replace(const std::string& name, std::string_view data) override;
  void remove(const std::string& name) override;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

class MemoryStorage : public Storage {
 public:
  std::optional<std::string> read(const std::string& name) const override;
  void append(const std::string& name, std::string_view data) override;
  void replace(const std::string& name, std::string_view data) override;
  void remove(const std::string& name) override;

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace sfwi::store
