#pragma once

#include <string>
#include <string_view>

#include "fenc/encompassing.hpp"

namespace fenc {

/// Two-column CSV of paired forecast errors with a header row naming the
/// columns (e1,e2). Blank lines are skipped. Malformed rows raise ParseError
/// with the offending line number.
ForecastErrorSet parse_errors_csv(std::string_view text, int h = 1, Index k0 = 1,
                                  const std::string& source = "<errors>");
ForecastErrorSet load_errors_csv(const std::string& path, int h = 1, Index k0 = 1);

}  // namespace fenc
