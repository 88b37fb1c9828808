#pragma once

#include <string>
#include <string_view>

namespace fenc {

enum class ReportFormat { Markdown, Csv, Json };

ReportFormat parse_report_format(std::string_view name);
std::string_view report_format_name(ReportFormat format);

/// Shortest decimal text that reads back to the same double.
std::string format_shortest(double value);

/// Fixed-point text with `decimals` digits.
std::string format_fixed(double value, int decimals);

/// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace fenc
