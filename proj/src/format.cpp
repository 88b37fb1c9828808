#include "fenc/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "fenc/error.hpp"

namespace fenc {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  fail(ErrorCode::InvalidArgument, "unknown output format '" + std::string(name) + "' (csv, json, markdown)");
}

std::string_view report_format_name(ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown: return "markdown";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
  }
  return "markdown";
}

std::string format_shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return format_shortest(value);
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  std::string out(buf.data());
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace fenc
