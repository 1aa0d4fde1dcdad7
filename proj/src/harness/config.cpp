#include "rclab/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"

namespace rclab::harness {

namespace {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = format_double(v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + '"';
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  char prev = 0;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok || (c == '.' && prev == '.')) return false;
    prev = c;
  }
  return true;
}

class LineParser {
 public:
  LineParser(std::string_view text, std::string origin, int line)
      : s_(text), origin_(std::move(origin)), line_(line) {}

  Value value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    Value v;
    const char c = s_[pos_];
    if (c == '"') {
      v = string();
    } else if (c == '[') {
      v = list();
    } else {
      v = scalar(word());
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after value");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + msg);
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  std::string word() {
    const std::size_t b = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t' && s_[pos_] != '\r')
      ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  std::string string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      }
      out += c;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::vector<double> list() {
    ++pos_;
    std::vector<double> out;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '"') fail("lists may hold numbers only");
      const Value v = scalar(word());
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out.push_back(static_cast<double>(*i));
      } else if (const auto* d = std::get_if<double>(&v)) {
        out.push_back(*d);
      } else {
        fail("lists may hold numbers only");
      }
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated list");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] != ',') fail("expected ',' or ']' in list");
      ++pos_;
    }
  }

  Value scalar(const std::string& w) {
    if (w.empty()) fail("missing value");
    if (w == "true") return true;
    if (w == "false") return false;
    if (w == "inf" || w == "+inf") return std::numeric_limits<double>::infinity();
    if (w == "-inf") return -std::numeric_limits<double>::infinity();
    if (w == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool integral = w.find_first_not_of("+-0123456789") == std::string::npos;
    if (integral) {
      std::int64_t i = 0;
      const char* first = w.data() + (w.front() == '+' ? 1 : 0);
      const auto res = std::from_chars(first, w.data() + w.size(), i);
      if (res.ec == std::errc() && res.ptr == w.data() + w.size()) return i;
    }
    try {
      return parse_double(w);
    } catch (const ConfigError&) {
      fail("cannot parse value '" + w + "' (strings must be quoted)");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::string origin_;
  int line_;
};

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "string";
    default: return "list";
  }
}

}  // namespace

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_real(d); }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const std::vector<double>& l) const {
      std::string out = "[";
      for (std::size_t i = 0; i < l.size(); ++i) out += (i ? ", " : "") + format_real(l[i]);
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v);
}

Config Config::parse(std::string_view text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::string table;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    LineParser lp(line, origin, line_no);
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) lp.fail("unterminated table header");
      const std::string_view rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') lp.fail("unexpected text after table header");
      const std::string_view name = trim(line.substr(1, close - 1));
      if (!valid_key(name)) lp.fail("invalid table name '" + std::string(name) + "'");
      table = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) lp.fail("expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    if (!valid_key(key)) lp.fail("invalid key '" + std::string(key) + "'");
    const std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
    LineParser vp(line.substr(eq + 1), origin, line_no);
    Value v = vp.value();
    if (!c.entries_.emplace(full, std::move(v)).second) lp.fail("duplicate key '" + full + "'");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string Config::serialize() const {
  std::map<std::string, std::vector<std::pair<std::string, const Value*>>> tables;
  for (const auto& [key, v] : entries_) {
    const auto dot = key.rfind('.');
    if (dot == std::string::npos)
      tables[""].emplace_back(key, &v);
    else
      tables[key.substr(0, dot)].emplace_back(key.substr(dot + 1), &v);
  }
  std::string out;
  auto emit = [&](const std::vector<std::pair<std::string, const Value*>>& items) {
    for (const auto& [k, v] : items)
      if (k == "schema_version") out += k + " = " + format_value(*v) + "\n";
    for (const auto& [k, v] : items)
      if (k != "schema_version") out += k + " = " + format_value(*v) + "\n";
  };
  if (auto it = tables.find(""); it != tables.end()) emit(it->second);
  for (const auto& [name, items] : tables) {
    if (name.empty()) continue;
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    emit(items);
  }
  return out;
}

const Value* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void Config::set(const std::string& key, Value v) {
  require(valid_key(key), "invalid config key '" + key + "'");
  entries_[key] = std::move(v);
}

bool Config::has_table(const std::string& table) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == table || e.first.rfind(table + ".", 0) == 0; });
}

// ---------------------------------------------------------------------------

const Value* ConfigReader::fetch(const std::string& key) {
  used_.insert(key);
  return config_.find(key);
}

void ConfigReader::type_error(const std::string& key, const char* expected) const {
  const Value* v = config_.find(key);
  throw ConfigError(config_.origin() + ": '" + key + "' must be " + expected + ", got " +
                    (v ? std::string(type_name(*v)) + " " + format_value(*v) : std::string("nothing")));
}

double ConfigReader::number(const std::string& key, std::optional<double> def) {
  const Value* v = fetch(key);
  double out = 0.0;
  if (!v) {
    if (!def) throw ConfigError(config_.origin() + ": missing required key '" + key + "'");
    out = *def;
  } else if (const auto* i = std::get_if<std::int64_t>(v)) {
    out = static_cast<double>(*i);
  } else if (const auto* d = std::get_if<double>(v)) {
    out = *d;
  } else {
    type_error(key, "a number");
  }
  resolved_.set(key, out);
  return out;
}

std::int64_t ConfigReader::integer(const std::string& key, std::optional<std::int64_t> def) {
  const Value* v = fetch(key);
  std::int64_t out = 0;
  if (!v) {
    if (!def) throw ConfigError(config_.origin() + ": missing required key '" + key + "'");
    out = *def;
  } else if (const auto* i = std::get_if<std::int64_t>(v)) {
    out = *i;
  } else if (const auto* d = std::get_if<double>(v); d && std::floor(*d) == *d && std::abs(*d) < 9e15) {
    out = static_cast<std::int64_t>(*d);
  } else {
    type_error(key, "an integer");
  }
  resolved_.set(key, out);
  return out;
}

std::uint64_t ConfigReader::seed(const std::string& key, std::uint64_t def) {
  const std::int64_t s = integer(key, static_cast<std::int64_t>(def));
  if (s < 0) throw ConfigError(config_.origin() + ": '" + key + "' must be a non-negative integer");
  return static_cast<std::uint64_t>(s);
}

bool ConfigReader::boolean(const std::string& key, std::optional<bool> def) {
  const Value* v = fetch(key);
  bool out = false;
  if (!v) {
    if (!def) throw ConfigError(config_.origin() + ": missing required key '" + key + "'");
    out = *def;
  } else if (const auto* b = std::get_if<bool>(v)) {
    out = *b;
  } else {
    type_error(key, "true or false");
  }
  resolved_.set(key, out);
  return out;
}

std::string ConfigReader::string(const std::string& key, std::optional<std::string> def) {
  const Value* v = fetch(key);
  std::string out;
  if (!v) {
    if (!def) throw ConfigError(config_.origin() + ": missing required key '" + key + "'");
    out = *def;
  } else if (const auto* s = std::get_if<std::string>(v)) {
    out = *s;
  } else {
    type_error(key, "a quoted string");
  }
  resolved_.set(key, out);
  return out;
}

std::string ConfigReader::choice(const std::string& key, std::initializer_list<const char*> allowed,
                                 std::optional<std::string> def) {
  const std::string s = string(key, std::move(def));
  std::string names;
  for (const char* a : allowed) {
    if (s == a) return s;
    names += (names.empty() ? "" : ", ") + std::string(a);
  }
  throw ConfigError(config_.origin() + ": '" + key + "' = \"" + s + "\" is not one of: " + names);
}

std::vector<double> ConfigReader::list(const std::string& key, std::optional<std::vector<double>> def) {
  const Value* v = fetch(key);
  std::vector<double> out;
  if (!v) {
    if (!def) throw ConfigError(config_.origin() + ": missing required key '" + key + "'");
    out = *def;
  } else if (const auto* l = std::get_if<std::vector<double>>(v)) {
    out = *l;
  } else {
    type_error(key, "a list of numbers");
  }
  resolved_.set(key, out);
  return out;
}

std::optional<double> ConfigReader::number_or_auto(const std::string& key) {
  const Value* v = config_.find(key);
  if (!v || (std::holds_alternative<std::string>(*v) && std::get<std::string>(*v) == "auto")) {
    used_.insert(key);
    resolved_.set(key, std::string("auto"));
    return std::nullopt;
  }
  if (std::holds_alternative<std::string>(*v)) type_error(key, "a number or \"auto\"");
  return number(key);
}

void ConfigReader::ignore(const std::string& key) {
  used_.insert(key);
  if (const Value* v = config_.find(key)) resolved_.set(key, *v);
}

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [key, v] : config_.entries())
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ConfigError(config_.origin() + ": unknown key(s): " + unknown);
}

}  // namespace rclab::harness
