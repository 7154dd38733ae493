#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace micontrast {

/// Flat `key = value` settings. Blank lines and lines starting with '#' are
/// ignored, as is anything after an unquoted '#'. Keys are normalised so
/// that `embed_dim` and `embed-dim` are the same key.
class KeyValueConfig {
 public:
  /// Throws std::runtime_error naming the offending line on malformed input.
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string_view key, std::string value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

  static std::string normalise_key(std::string_view key);

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace micontrast
