#include "grasp/kv_text.hpp"

#include "grasp/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace grasp {

std::string_view trim(std::string_view text) noexcept {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(separator, pos);
    out.emplace_back(trim(text.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items, char separator) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(separator);
    out += items[i];
  }
  return out;
}

KeyValueDocument KeyValueDocument::parse(std::string_view text, std::string source) {
  KeyValueDocument doc;
  doc.source_ = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    ++line_no;
    const auto line = trim(raw);
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        fail(ErrorKind::FormatError,
             fmt::format("{}:{}: expected 'key = value'", doc.source_, line_no));
      }
      auto key = trim(line.substr(0, eq));
      if (key.empty()) {
        fail(ErrorKind::FormatError, fmt::format("{}:{}: empty key", doc.source_, line_no));
      }
      doc.entries_.push_back(Entry{std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FormatError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

void KeyValueDocument::add(std::string key, std::string value) {
  entries_.push_back(Entry{std::move(key), std::move(value), 0});
}

std::string KeyValueDocument::serialize() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.key;
    out += " = ";
    out += e.value;
    out += '\n';
  }
  return out;
}

void KeyValueDocument::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << serialize();
  if (!out) fail(ErrorKind::IoError, fmt::format("write to {} failed", path.string()));
}

const KeyValueDocument::Entry* KeyValueDocument::find_last(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

std::optional<std::string> KeyValueDocument::get(std::string_view key) const {
  const auto* e = find_last(key);
  if (!e) return std::nullopt;
  return e->value;
}

std::string KeyValueDocument::require(std::string_view key) const {
  const auto* e = find_last(key);
  if (!e) fail(ErrorKind::FormatError, fmt::format("{}: missing key '{}'", source_, key));
  return e->value;
}

std::vector<const KeyValueDocument::Entry*> KeyValueDocument::all(std::string_view key) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(&e);
  }
  return out;
}

double KeyValueDocument::to_double(const Entry& entry) const {
  double value = 0.0;
  const auto* begin = entry.value.data();
  const auto* end = begin + entry.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::FormatError, fmt::format("{}:{}: '{}' is not a number for key '{}'", source_,
                                             entry.line, entry.value, entry.key));
  }
  return value;
}

std::int64_t KeyValueDocument::to_int(const Entry& entry) const {
  std::int64_t value = 0;
  const auto* begin = entry.value.data();
  const auto* end = begin + entry.value.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::FormatError, fmt::format("{}:{}: '{}' is not an integer for key '{}'", source_,
                                             entry.line, entry.value, entry.key));
  }
  return value;
}

double KeyValueDocument::get_double(std::string_view key, double fallback) const {
  const auto* e = find_last(key);
  return e ? to_double(*e) : fallback;
}

std::int64_t KeyValueDocument::get_int(std::string_view key, std::int64_t fallback) const {
  const auto* e = find_last(key);
  return e ? to_int(*e) : fallback;
}

double KeyValueDocument::require_double(std::string_view key) const {
  const auto* e = find_last(key);
  if (!e) fail(ErrorKind::FormatError, fmt::format("{}: missing key '{}'", source_, key));
  return to_double(*e);
}

std::int64_t KeyValueDocument::require_int(std::string_view key) const {
  const auto* e = find_last(key);
  if (!e) fail(ErrorKind::FormatError, fmt::format("{}: missing key '{}'", source_, key));
  return to_int(*e);
}

}  // namespace grasp
