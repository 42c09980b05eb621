#include "store/storage.hpp"

#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace sfwi::store {

DiskStorage::DiskStorage(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store directory " + root_.string() + ": " + ec.message());
}

std::optional<std::string> DiskStorage::read(const std::string& name) const {
  std::ifstream in(root_ / name, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void DiskStorage::append(const std::string& name, std::string_view data) {
  std::ofstream out(root_ / name, std::ios::binary | std::ios::app);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + (root_ / name).string());
}

void DiskStorage::replace(const std::string& name, std::string_view data) {
  auto tmp = root_ / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, root_ / name, ec);
  if (ec) throw Error(ErrorCode::Io, "rename failed: " + ec.message());
}

void DiskStorage::remove(const std::string& name) {
  std::error_code ec;
  std::filesystem::remove(root_ / name, ec);
}

std::optional<std::string> MemoryStorage::read(const std::string& name) const {
  auto it = files_.find(name);
  if (it == files_.end()) return std::nullopt;
  return it->second;
}

void MemoryStorage::append(const std::string& name, std::string_view data) { files_[name].append(data); }
void MemoryStorage::replace(const std::string& name, std::string_view data) { files_[name] = std::string(data); }
void MemoryStorage::remove(const std::string& name) { files_.erase(name); }

}  // namespace sfwi::store
