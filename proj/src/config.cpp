#include "wristangle/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "wristangle/error.hpp"

namespace wristangle {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return !s.empty() && ec == std::errc() && ptr == end;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source) {
  KeyValueConfig cfg;
  cfg.source_ = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Config,
                  fmt::format("{}:{}: expected 'key = value'", cfg.source_, line_no));
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty())
      throw Error(ErrorKind::Config, fmt::format("{}:{}: empty key", cfg.source_, line_no));
    if (cfg.entries_.contains(key))
      throw Error(ErrorKind::Config,
                  fmt::format("{}:{}: duplicate key '{}'", cfg.source_, line_no, key));
    cfg.entries_[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no, false};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueConfig::Entry* KeyValueConfig::take(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void KeyValueConfig::fail(const std::string& key, const Entry& e, std::string_view why) const {
  throw Error(ErrorKind::Config,
              fmt::format("{}:{}: key '{}': {} ('{}')", source_, e.line, key, why, e.value));
}

void KeyValueConfig::get(const std::string& key, double& out) {
  if (const Entry* e = take(key); e && !parse_number(e->value, out)) fail(key, *e, "not a number");
}

void KeyValueConfig::get(const std::string& key, int& out) {
  if (const Entry* e = take(key); e && !parse_number(e->value, out))
    fail(key, *e, "not an integer");
}

void KeyValueConfig::get(const std::string& key, std::int64_t& out) {
  if (const Entry* e = take(key); e && !parse_number(e->value, out))
    fail(key, *e, "not an integer");
}

void KeyValueConfig::get(const std::string& key, std::uint64_t& out) {
  if (const Entry* e = take(key); e && !parse_number(e->value, out))
    fail(key, *e, "not an unsigned integer");
}

void KeyValueConfig::get(const std::string& key, bool& out) {
  const Entry* e = take(key);
  if (!e) return;
  if (e->value == "true" || e->value == "1")
    out = true;
  else if (e->value == "false" || e->value == "0")
    out = false;
  else
    fail(key, *e, "not a boolean");
}

void KeyValueConfig::get(const std::string& key, std::string& out) {
  if (const Entry* e = take(key)) out = e->value;
}

void KeyValueConfig::get(const std::string& key, std::vector<double>& out) {
  const Entry* e = take(key);
  if (!e) return;
  std::vector<double> values;
  std::string_view rest = e->value;
  while (true) {
    const auto comma = rest.find(',');
    double v = 0.0;
    if (!parse_number(rest.substr(0, comma), v)) fail(key, *e, "not a list of numbers");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  out = std::move(values);
}

void KeyValueConfig::finish() const {
  for (const auto& [key, e] : entries_)
    if (!e.used)
      throw Error(ErrorKind::Config,
                  fmt::format("{}:{}: unknown config key '{}'", source_, e.line, key));
}

}  // namespace wristangle
