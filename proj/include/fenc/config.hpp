#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fenc {

/// Value in an experiment file: number, string, boolean or (nested) array.
struct ConfigValue {
  struct Array {
    std::vector<ConfigValue> items;
  };
  std::variant<double, std::string, bool, Array> data;
  bool integral = false;  // number written without fraction or exponent
  int line = 0;
};

/// Flat view of a small TOML-style document: `[section]` headers, `key = value`
/// pairs, `#` comments, strings, numbers, booleans and arrays. Keys are stored
/// as "section.key" (or just "key" before the first header).
///
/// Readers take values out with the typed getters; `finish()` then reports any
/// key that nobody consumed, so typos surface as errors with their key path.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, std::string source = "<config>");
  static ConfigDocument load(const std::string& path);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  long long integer(const std::string& key, long long fallback);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::vector<double>> number_rows(const std::string& key,
                                               const std::vector<std::vector<double>>& fallback);

  /// Throws ConfigError naming the first unconsumed key.
  void finish() const;

  const std::string& source() const { return source_; }

 private:
  [[noreturn]] void bad(const std::string& key, const std::string& message) const;
  const ConfigValue* take(const std::string& key);

  std::string source_;
  std::map<std::string, ConfigValue> values_;
  std::map<std::string, bool> used_;
};

}  // namespace fenc
