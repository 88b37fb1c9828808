#include "fenc/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fenc/error.hpp"

namespace fenc {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  std::map<std::string, ConfigValue> run() {
    std::map<std::string, ConfigValue> out;
    std::string section;
    while (!at_end()) {
      skip_blank_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        const std::string name = read_key();
        skip_spaces();
        expect(']');
        section = name;
        end_of_line();
        continue;
      }
      const int key_line = line_;
      const std::string key = read_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      ConfigValue value = read_value();
      value.line = key_line;
      end_of_line();
      const std::string path = section.empty() ? key : section + "." + key;
      if (out.count(path) != 0) error(key_line, "duplicate key '" + path + "'");
      out.emplace(path, std::move(value));
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void error(int line, const std::string& message) const {
    fail(ErrorCode::ConfigError, source_ + ":" + std::to_string(line) + ": " + message);
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_blank_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  // Inside arrays newlines are whitespace.
  void skip_array_space() { skip_blank_and_comments(); }

  void end_of_line() {
    skip_spaces();
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
    if (at_end()) return;
    if (peek() != '\n') error(line_, std::string("unexpected character '") + peek() + "'");
    ++pos_;
    ++line_;
  }

  void expect(char c) {
    if (at_end() || peek() != c) error(line_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-' || peek() == '.')) {
      ++pos_;
    }
    if (start == pos_) error(line_, "expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  ConfigValue read_value() {
    if (at_end()) error(line_, "missing value");
    const char c = peek();
    ConfigValue v;
    if (c == '"' || c == '\'') {
      v.data = read_string(c);
    } else if (c == '[') {
      ++pos_;
      ConfigValue::Array arr;
      skip_array_space();
      while (!at_end() && peek() != ']') {
        arr.items.push_back(read_value());
        skip_array_space();
        if (!at_end() && peek() == ',') {
          ++pos_;
          skip_array_space();
        } else {
          break;
        }
      }
      expect(']');
      v.data = std::move(arr);
    } else if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v.data = true;
    } else if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v.data = false;
    } else {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
                           peek() == '-' || peek() == '+' || peek() == '_')) {
        ++pos_;
      }
      std::string token(text_.substr(start, pos_ - start));
      std::erase(token, '_');
      if (!token.empty() && token[0] == '+') token.erase(0, 1);
      double number = 0.0;
      const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), number);
      if (token.empty() || ec != std::errc() || end != token.data() + token.size() || !std::isfinite(number)) {
        error(line_, "cannot parse value '" + std::string(text_.substr(start, pos_ - start)) + "'");
      }
      v.data = number;
      v.integral = token.find_first_of(".eE") == std::string::npos;
    }
    return v;
  }

  std::string read_string(char quote) {
    ++pos_;
    std::string out;
    while (!at_end() && peek() != quote) {
      char c = peek();
      if (c == '\n') error(line_, "unterminated string");
      if (c == '\\' && quote == '"') {
        ++pos_;
        if (at_end()) break;
        c = peek();
        switch (c) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: out.push_back(c); break;
        }
      } else {
        out.push_back(c);
      }
      ++pos_;
    }
    expect(quote);
    return out;
  }

  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
  ConfigDocument doc;
  doc.source_ = std::move(source);
  doc.values_ = Parser(text, doc.source_).run();
  for (const auto& [key, value] : doc.values_) doc.used_[key] = false;
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

bool ConfigDocument::has(const std::string& key) const { return values_.count(key) != 0; }

void ConfigDocument::bad(const std::string& key, const std::string& message) const {
  const auto it = values_.find(key);
  const std::string where = it == values_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
  fail(ErrorCode::ConfigError, where + ": " + key + ": " + message);
}

const ConfigValue* ConfigDocument::take(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

double ConfigDocument::number(const std::string& key, double fallback) {
  const ConfigValue* v = take(key);
  if (v == nullptr) return fallback;
  if (const auto* d = std::get_if<double>(&v->data)) return *d;
  bad(key, "expected a number");
}

long long ConfigDocument::integer(const std::string& key, long long fallback) {
  const ConfigValue* v = take(key);
  if (v == nullptr) return fallback;
  const auto* d = std::get_if<double>(&v->data);
  if (d == nullptr || !v->integral || std::abs(*d) > 9.0e15) bad(key, "expected an integer");
  return static_cast<long long>(*d);
}

std::string ConfigDocument::string(const std::string& key, const std::string& fallback) {
  const ConfigValue* v = take(key);
  if (v == nullptr) return fallback;
  if (const auto* s = std::get_if<std::string>(&v->data)) return *s;
  bad(key, "expected a string");
}

std::vector<double> ConfigDocument::numbers(const std::string& key, const std::vector<double>& fallback) {
  const ConfigValue* v = take(key);
  if (v == nullptr) return fallback;
  if (const auto* d = std::get_if<double>(&v->data)) return {*d};
  const auto* arr = std::get_if<ConfigValue::Array>(&v->data);
  if (arr == nullptr) bad(key, "expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& item : arr->items) {
    const auto* d = std::get_if<double>(&item.data);
    if (d == nullptr) bad(key, "expected an array of numbers");
    out.push_back(*d);
  }
  if (out.empty()) bad(key, "array must not be empty");
  return out;
}

std::vector<std::vector<double>> ConfigDocument::number_rows(
    const std::string& key, const std::vector<std::vector<double>>& fallback) {
  const ConfigValue* v = take(key);
  if (v == nullptr) return fallback;
  const auto* arr = std::get_if<ConfigValue::Array>(&v->data);
  if (arr == nullptr || arr->items.empty()) bad(key, "expected an array of arrays of numbers");
  std::vector<std::vector<double>> out;
  for (const auto& row : arr->items) {
    const auto* inner = std::get_if<ConfigValue::Array>(&row.data);
    if (inner == nullptr) bad(key, "expected an array of arrays of numbers");
    std::vector<double> values;
    for (const auto& item : inner->items) {
      const auto* d = std::get_if<double>(&item.data);
      if (d == nullptr) bad(key, "expected an array of arrays of numbers");
      values.push_back(*d);
    }
    out.push_back(std::move(values));
  }
  return out;
}

void ConfigDocument::finish() const {
  for (const auto& [key, used] : used_) {
    if (!used) bad(key, "unknown key");
  }
}

}  // namespace fenc
