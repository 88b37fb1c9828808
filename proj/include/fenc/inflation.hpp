#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fenc/encompassing.hpp"
#include "fenc/error.hpp"
#include "fenc/format.hpp"

namespace fenc {

using Matrix = Eigen::MatrixXd;

/// Calendar quarter stored as year * 4 + (quarter - 1).
struct Quarter {
  int index = 0;

  static Quarter from(int year, int quarter) { return {year * 4 + quarter - 1}; }
  /// Parses "YYYY-Qq" (also accepts "YYYYQq").
  static std::optional<Quarter> parse(std::string_view text);
  int year() const { return index >= 0 ? index / 4 : -((-index + 3) / 4); }
  int quarter() const { return index - year() * 4 + 1; }
  std::string text() const;
  auto operator<=>(const Quarter&) const = default;
};

/// Contiguous quarterly price panel. Column c holds country c; entries outside
/// that country's usable block are NaN.
class InflationPanel {
 public:
  struct Coverage {
    Index first = 0;  // row of the first usable quarter
    Index last = 0;   // row of the last usable quarter (inclusive)
    Index length() const { return last - first + 1; }
  };

  /// Validates positivity and keeps, per country, its longest run of observed
  /// quarters (the later run wins a tie). Missing prices are NaN.
  InflationPanel(std::vector<std::string> countries, Quarter start, Matrix prices);

  const std::vector<std::string>& countries() const { return countries_; }
  Index country_count() const { return static_cast<Index>(countries_.size()); }
  Index periods() const { return prices_.rows(); }
  Quarter start() const { return start_; }
  Quarter date(Index row) const { return {start_.index + static_cast<int>(row)}; }
  const Matrix& prices() const { return prices_; }
  const Coverage& coverage(Index country) const { return coverage_.at(static_cast<std::size_t>(country)); }
  /// Index of `code`, or -1.
  Index find(const std::string& code) const;
  /// Prices over the country's usable block.
  Vector country_prices(Index country) const;

 private:
  std::vector<std::string> countries_;
  Quarter start_;
  Matrix prices_;
  std::vector<Coverage> coverage_;
};

struct PanelFilter {
  std::vector<std::string> countries;  // empty keeps all
  std::optional<Quarter> from;
  std::optional<Quarter> to;
  Index min_quarters = 80;
};

/// Reads a long-format CSV with header `country,date,hcpi`. Empty or "NA"
/// prices count as missing. Throws ParseError for malformed rows (with line
/// numbers), CoverageError when a country keeps fewer than `min_quarters`
/// contiguous quarters, and InvalidArgument when fewer than two countries remain.
InflationPanel load_panel(const std::string& path, const PanelFilter& filter = {});
InflationPanel parse_panel(std::string_view text, const PanelFilter& filter = {},
                           const std::string& source = "<panel>");

/// (400 / h) ln(P_t / P_{t-h}); the first h entries (and any entry touching a
/// missing price) are NaN. Throws NonPositivePrice.
Vector annualized_inflation(std::span<const double> prices, int h);
Vector annualized_inflation(const Vector& prices, int h);

/// Equal-weight cross-country average of quarter-on-quarter inflation per
/// panel row. Rows before the first contributing quarter are NaN; an interior
/// row without contributors throws EmptyQuarter. `exclude` drops one country.
Vector global_inflation(const InflationPanel& panel, std::optional<Index> exclude = std::nullopt);

struct CountryStudyConfig {
  int h = 4;
  double pi0 = 0.25;
  int p2 = 4;
  int p_max = 8;
  std::vector<double> mu0_list{0.40, 0.45};
  HacConfig hac;
  bool exclude_own = false;

  void validate() const;
};

struct CountryResult {
  std::string country;
  double rmse_ratio = 0.0;  // RMSE(large) / RMSE(benchmark)
  std::vector<double> mu0;
  std::vector<double> p_values;
  std::vector<double> statistics;
  int selected_lag = 0;
  Index n_forecasts = 0;
  Quarter first_target;
  Quarter last_target;
};

/// Regression layout for one country, exposed for timing checks.
struct CountryDesign {
  Matrix predictors;  // rows are block quarters; intercept, own lags, global lags
  Vector target;      // h-quarter annualized inflation
  Index first_row = 0;
  Index benchmark_columns = 0;
  int selected_lag = 0;
  Index block_first = 0;  // panel row of block row 0
};

CountryDesign build_country_design(const InflationPanel& panel, Index country, const CountryStudyConfig& config);

/// Nested forecasts with and without global inflation, then the encompassing
/// test for every mu0. Errors carry the country code.
CountryResult country_encompassing(const InflationPanel& panel, Index country, const CountryStudyConfig& config);
CountryResult country_encompassing(const InflationPanel& panel, const std::string& country,
                                   const CountryStudyConfig& config);

struct StudyRow {
  std::string country;
  std::optional<CountryResult> result;
  std::optional<ErrorCode> error;
  std::string message;
};

struct Study {
  CountryStudyConfig config;
  std::vector<StudyRow> rows;
};

/// All countries in panel order. Per-country failures are recorded in the row.
Study run_study(const InflationPanel& panel, const CountryStudyConfig& config, int threads = 1);

/// Markdown marks a ratio below 1 and each p-value below 0.10 in bold.
std::string render_study(const Study& study, ReportFormat format);

}  // namespace fenc
