#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rclab::harness {

inline constexpr std::int64_t kSchemaVersion = 1;

// Integers and reals are kept apart so seeds survive a round trip exactly.
using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;

std::string format_value(const Value& v);

/// Flat key/value document. Keys are dotted paths; `[a.b]` table headers
/// prefix the keys that follow. Syntax is the TOML subset
///
///   # comment
///   key = 1 | 2.5 | true | "text" | [1, 2.5]
///   [table]
///
/// serialize() emits top-level keys first, then one table per prefix, in
/// sorted order, so parse(serialize(c)) == c.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  std::string serialize() const;

  const Value* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
  void set(const std::string& key, Value v);
  void erase(const std::string& key) { entries_.erase(key); }
  // True if any key equals `table` or starts with `table.`.
  bool has_table(const std::string& table) const;

  const std::map<std::string, Value>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }
  void set_origin(std::string o) { origin_ = std::move(o); }

  bool operator==(const Config& other) const { return entries_ == other.entries_; }

 private:
  std::map<std::string, Value> entries_;
  std::string origin_ = "<config>";
};

/// Typed access with defaults. Every value read, given or defaulted, is
/// copied into resolved(); finish() rejects keys that were never read.
class ConfigReader {
 public:
  explicit ConfigReader(const Config& config) : config_(config) { resolved_.set_origin(config.origin()); }

  double number(const std::string& key, std::optional<double> def = {});
  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = {});
  std::uint64_t seed(const std::string& key, std::uint64_t def = 0);
  bool boolean(const std::string& key, std::optional<bool> def = {});
  std::string string(const std::string& key, std::optional<std::string> def = {});
  std::string choice(const std::string& key, std::initializer_list<const char*> allowed,
                     std::optional<std::string> def = {});
  std::vector<double> list(const std::string& key, std::optional<std::vector<double>> def = {});
  // Number, or the string "auto" (returned as nullopt).
  std::optional<double> number_or_auto(const std::string& key);

  // Marks a key as handled without reading it.
  void ignore(const std::string& key);
  void finish() const;

  const Config& resolved() const { return resolved_; }
  const Config& source() const { return config_; }

 private:
  const Value* fetch(const std::string& key);
  [[noreturn]] void type_error(const std::string& key, const char* expected) const;

  const Config& config_;
  Config resolved_;
  std::set<std::string> used_;
};

}  // namespace rclab::harness
