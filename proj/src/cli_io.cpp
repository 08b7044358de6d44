#include "gembed/cli_io.hpp"

#include <cstdio>
#include <fstream>

#include "gembed/errors.hpp"
#include "gembed/version.hpp"

namespace gembed {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_header_comment(const Json& resolved_config) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(resolved_config.dump())));
  return std::string("# gembed ") + kVersion + " config_hash=" + hex;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path);
}

ConfigReader::ConfigReader(const Json& doc, Json& resolved, std::string path)
    : doc_(doc), resolved_(resolved), path_(std::move(path)) {
  if (!doc_.is_object()) throw ValidationError("config " + (path_.empty() ? std::string("root") : path_) + " must be a JSON object");
  if (!resolved_.is_object()) resolved_ = Json::object();
}

bool ConfigReader::has(const std::string& key) const { return doc_.contains(key); }

const Json& ConfigReader::raw(const std::string& key) {
  if (!has(key)) throw ValidationError("missing config key '" + key_path(key) + "'");
  used_.insert(key);
  return doc_.at(key);
}

ConfigReader ConfigReader::child(const std::string& key) {
  const Json& sub = raw(key);
  if (!sub.is_object()) throw ValidationError("config key '" + key_path(key) + "' must be an object");
  resolved_[key] = Json::object();
  return ConfigReader(sub, resolved_[key], key_path(key));
}

void ConfigReader::finish() const {
  for (const auto& item : doc_.items())
    if (!used_.count(item.key())) throw ValidationError("unknown config key '" + key_path(item.key()) + "'");
}

void ConfigReader::type_error(const std::string& key) const {
  throw ValidationError("config key '" + key_path(key) + "' has the wrong type");
}

}  // namespace gembed
