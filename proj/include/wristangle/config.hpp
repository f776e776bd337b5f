#pragma once

// Plain-text key/value configuration:
//
//   # comment
//   key = value
//   sensor.placement_gain = 0.45, 0.40, 0.40, 0.35
//
// Keys are dotted names; every key in a file must be consumed by the reader
// or loading fails with an error naming the first unknown key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wristangle {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, std::string source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.contains(key); }

  // Each getter leaves `out` untouched when the key is absent and marks the key consumed.
  void get(const std::string& key, double& out);
  void get(const std::string& key, int& out);
  void get(const std::string& key, std::int64_t& out);
  void get(const std::string& key, std::uint64_t& out);
  void get(const std::string& key, bool& out);
  void get(const std::string& key, std::string& out);
  void get(const std::string& key, std::vector<double>& out);

  // Throws ErrorKind::Config naming the first key no getter asked for.
  void finish() const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
  };
  const Entry* take(const std::string& key);
  [[noreturn]] void fail(const std::string& key, const Entry& e, std::string_view why) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace wristangle
