#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

namespace gembed {

// std::map-backed, so references into nested values stay valid while
// siblings are added.
using Json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// "# gembed <version> config_hash=<16 hex digits>" for the resolved config.
std::string csv_header_comment(const Json& resolved_config);

/// Writes `content` to a sibling temp file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Reads a JSON object while recording every value used (defaults
/// included) into `resolved`. finish() rejects keys that were never read.
class ConfigReader {
 public:
  ConfigReader(const Json& doc, Json& resolved, std::string path = "");

  bool has(const std::string& key) const;

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) {
      resolved_[key] = fallback;
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    const Json& v = raw(key);
    try {
      T out = v.get<T>();
      resolved_[key] = v;
      return out;
    } catch (const nlohmann::json::exception&) {
      type_error(key);
    }
  }

  /// Marks the key used and returns it unconverted; the caller records the
  /// resolved value through set_resolved.
  const Json& raw(const std::string& key);
  void set_resolved(const std::string& key, Json value) { resolved_[key] = std::move(value); }

  ConfigReader child(const std::string& key);

  /// Throws ValidationError naming the first unknown key.
  void finish() const;

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  [[noreturn]] void type_error(const std::string& key) const;

  const Json& doc_;
  Json& resolved_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace gembed
