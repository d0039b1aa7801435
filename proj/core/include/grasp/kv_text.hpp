#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grasp {

/// UTF-8 `key = value` lines with LF endings; `#` starts a comment line.
/// Keys may repeat and order is preserved. Used for dataset manifests and
/// config files.
class KeyValueDocument {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  /// Throws FormatError naming `source` and the offending line.
  static KeyValueDocument parse(std::string_view text, std::string source = "<memory>");
  static KeyValueDocument load(const std::filesystem::path& path);

  void add(std::string key, std::string value);
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::string& source() const noexcept { return source_; }

  /// Last value for `key`.
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;
  std::vector<const Entry*> all(std::string_view key) const;

  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  double require_double(std::string_view key) const;
  std::int64_t require_int(std::string_view key) const;

 private:
  double to_double(const Entry& entry) const;
  std::int64_t to_int(const Entry& entry) const;
  const Entry* find_last(std::string_view key) const;

  std::vector<Entry> entries_;
  std::string source_ = "<memory>";
};

/// Comma-separated list, whitespace-trimmed; empty string gives an empty list.
std::vector<std::string> split_list(std::string_view text, char separator = ',');
std::string join_list(const std::vector<std::string>& items, char separator = ',');
std::string_view trim(std::string_view text) noexcept;

}  // namespace grasp
