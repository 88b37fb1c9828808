#include "fenc/errors_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "fenc/error.hpp"

namespace fenc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return !text.empty() && ec == std::errc() && end == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

ForecastErrorSet parse_errors_csv(std::string_view text, int h, Index k0, const std::string& source) {
  std::vector<double> e1;
  std::vector<double> e2;
  bool have_header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (trim(line).empty()) continue;
    const std::size_t comma = line.find(',');
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail(ErrorCode::ParseError, where + "expected two comma-separated columns");
    }
    if (!have_header) {
      have_header = true;
      double probe = 0.0;
      if (parse_number(line.substr(0, comma), probe)) {
        fail(ErrorCode::ParseError, where + "expected a header row such as 'e1,e2'");
      }
      continue;
    }
    double a = 0.0;
    double b = 0.0;
    if (!parse_number(line.substr(0, comma), a) || !parse_number(line.substr(comma + 1), b)) {
      fail(ErrorCode::ParseError, where + "cannot parse '" + std::string(trim(line)) + "' as two finite numbers");
    }
    e1.push_back(a);
    e2.push_back(b);
  }
  if (!have_header) fail(ErrorCode::EmptyInput, source + ": file is empty");
  if (e1.empty()) fail(ErrorCode::EmptyInput, source + ": no data rows");
  return ForecastErrorSet(Eigen::Map<const Vector>(e1.data(), static_cast<Index>(e1.size())),
                          Eigen::Map<const Vector>(e2.data(), static_cast<Index>(e2.size())), h, k0);
}

ForecastErrorSet load_errors_csv(const std::string& path, int h, Index k0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open errors file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_errors_csv(buffer.str(), h, k0, path);
}

}  // namespace fenc
