#include "fenc/inflation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fenc/regression.hpp"
#include "json.hpp"
#include "parallel.hpp"

namespace fenc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& source, int line, const std::string& message) {
  fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

std::optional<Quarter> Quarter::parse(std::string_view text) {
  const std::string s = trim(text);
  if (s.size() < 6) return std::nullopt;
  int year = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + 4, year);
  if (ec != std::errc() || end != s.data() + 4) return std::nullopt;
  std::size_t pos = 4;
  if (s[pos] == '-') ++pos;
  if (pos + 2 != s.size() || (s[pos] != 'Q' && s[pos] != 'q')) return std::nullopt;
  const char q = s[pos + 1];
  if (q < '1' || q > '4') return std::nullopt;
  return Quarter::from(year, q - '0');
}

std::string Quarter::text() const { return std::to_string(year()) + "-Q" + std::to_string(quarter()); }

InflationPanel::InflationPanel(std::vector<std::string> countries, Quarter start, Matrix prices)
    : countries_(std::move(countries)), start_(start), prices_(std::move(prices)) {
  if (countries_.empty()) fail(ErrorCode::InvalidArgument, "panel: no countries");
  if (prices_.cols() != country_count()) fail(ErrorCode::InvalidArgument, "panel: one price column per country");
  if (prices_.rows() < 2) fail(ErrorCode::InvalidArgument, "panel: need at least two quarters");
  for (Index c = 0; c < country_count(); ++c) {
    Index best_first = 0;
    Index best_len = 0;
    Index run_first = 0;
    Index run_len = 0;
    for (Index t = 0; t < periods(); ++t) {
      const double p = prices_(t, c);
      if (std::isnan(p)) {
        run_len = 0;
        continue;
      }
      if (!std::isfinite(p) || p <= 0.0) {
        fail(ErrorCode::NonPositivePrice, "panel: " + countries_[static_cast<std::size_t>(c)] + " has a price <= 0 at " +
                                              date(t).text());
      }
      if (run_len == 0) run_first = t;
      ++run_len;
      if (run_len >= best_len) {
        best_len = run_len;
        best_first = run_first;
      }
    }
    if (best_len == 0) {
      fail(ErrorCode::CoverageError, "panel: " + countries_[static_cast<std::size_t>(c)] + " has no observed prices");
    }
    const Coverage cov{best_first, best_first + best_len - 1};
    for (Index t = 0; t < periods(); ++t) {
      if (t < cov.first || t > cov.last) prices_(t, c) = kNaN;
    }
    coverage_.push_back(cov);
  }
}

Index InflationPanel::find(const std::string& code) const {
  const auto it = std::find(countries_.begin(), countries_.end(), lower(code));
  return it == countries_.end() ? -1 : static_cast<Index>(it - countries_.begin());
}

Vector InflationPanel::country_prices(Index country) const {
  const Coverage& cov = coverage(country);
  return prices_.col(country).segment(cov.first, cov.length());
}

InflationPanel parse_panel(std::string_view text, const PanelFilter& filter, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<std::string> order;
  std::map<std::string, std::map<int, double>> series;

  std::vector<std::string> wanted;
  for (const auto& c : filter.countries) wanted.push_back(lower(trim(c)));

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() != 3 || lower(fields[0]) != "country" || lower(fields[1]) != "date" ||
          lower(fields[2]) != "hcpi") {
        parse_fail(source, line_no, "expected header 'country,date,hcpi'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) parse_fail(source, line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    const std::string code = lower(fields[0]);
    if (code.size() != 3 || !std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
      parse_fail(source, line_no, "country code must be three letters, got '" + fields[0] + "'");
    }
    const auto q = Quarter::parse(fields[1]);
    if (!q) parse_fail(source, line_no, "date must look like YYYY-Qq, got '" + fields[1] + "'");
    double price = kNaN;
    if (!fields[2].empty() && lower(fields[2]) != "na") {
      const char* first = fields[2].data();
      const char* last = first + fields[2].size();
      const auto [end, ec] = std::from_chars(first, last, price);
      if (ec != std::errc() || end != last || !std::isfinite(price)) {
        parse_fail(source, line_no, "cannot parse price '" + fields[2] + "'");
      }
      if (price <= 0.0) parse_fail(source, line_no, "price must be positive, got '" + fields[2] + "'");
    }
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), code) == wanted.end()) continue;
    if ((filter.from && *q < *filter.from) || (filter.to && *q > *filter.to)) continue;
    auto& s = series[code];
    if (s.empty()) order.push_back(code);
    if (!s.emplace(q->index, price).second) {
      parse_fail(source, line_no, "duplicate entry for " + code + " " + q->text());
    }
  }
  if (!have_header) parse_fail(source, line_no, "empty file");
  for (const auto& w : wanted) {
    if (series.count(w) == 0) fail(ErrorCode::InvalidArgument, source + ": country '" + w + "' not found");
  }
  if (order.size() < 2) {
    fail(ErrorCode::InvalidArgument, source + ": need at least two countries, found " + std::to_string(order.size()));
  }

  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& [code, s] : series) {
    for (const auto& [idx, price] : s) {
      if (std::isnan(price)) continue;
      lo = std::min(lo, idx);
      hi = std::max(hi, idx);
    }
  }
  if (lo > hi) fail(ErrorCode::CoverageError, source + ": no observed prices");
  Matrix prices = Matrix::Constant(hi - lo + 1, static_cast<Index>(order.size()), kNaN);
  for (std::size_t c = 0; c < order.size(); ++c) {
    for (const auto& [idx, price] : series[order[c]]) {
      if (idx >= lo && idx <= hi) prices(idx - lo, static_cast<Index>(c)) = price;
    }
  }
  InflationPanel panel(order, Quarter{lo}, std::move(prices));
  for (Index c = 0; c < panel.country_count(); ++c) {
    const auto& cov = panel.coverage(c);
    if (cov.length() < filter.min_quarters) {
      fail(ErrorCode::CoverageError, source + ": " + panel.countries()[static_cast<std::size_t>(c)] + " has " +
                                         std::to_string(cov.length()) + " contiguous quarters, need " +
                                         std::to_string(filter.min_quarters));
    }
  }
  return panel;
}

InflationPanel load_panel(const std::string& path, const PanelFilter& filter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open panel file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_panel(buffer.str(), filter, path);
}

Vector annualized_inflation(std::span<const double> prices, int h) {
  if (h < 1) fail(ErrorCode::InvalidArgument, "annualized_inflation: h must be >= 1");
  const auto n = static_cast<Index>(prices.size());
  for (Index t = 0; t < n; ++t) {
    const double p = prices[static_cast<std::size_t>(t)];
    if (!std::isnan(p) && !(p > 0.0 && std::isfinite(p))) {
      fail(ErrorCode::NonPositivePrice, "annualized_inflation: price at position " + std::to_string(t) +
                                            " is not a positive number");
    }
  }
  Vector out = Vector::Constant(n, kNaN);
  const double scale = 400.0 / h;
  for (Index t = h; t < n; ++t) {
    const double now = prices[static_cast<std::size_t>(t)];
    const double then = prices[static_cast<std::size_t>(t - h)];
    if (!std::isnan(now) && !std::isnan(then)) out(t) = scale * std::log(now / then);
  }
  return out;
}

Vector annualized_inflation(const Vector& prices, int h) {
  return annualized_inflation(std::span<const double>(prices.data(), static_cast<std::size_t>(prices.size())), h);
}

Vector global_inflation(const InflationPanel& panel, std::optional<Index> exclude) {
  const Index T = panel.periods();
  Vector sum = Vector::Zero(T);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(T);
  for (Index c = 0; c < panel.country_count(); ++c) {
    if (exclude && *exclude == c) continue;
    const Vector pi1 = annualized_inflation(Vector(panel.prices().col(c)), 1);
    for (Index t = 0; t < T; ++t) {
      if (std::isnan(pi1(t))) continue;
      sum(t) += pi1(t);
      ++count(t);
    }
  }
  Index first = 0;
  while (first < T && count(first) == 0) ++first;
  Index last = T - 1;
  while (last >= first && count(last) == 0) --last;
  if (first > last) fail(ErrorCode::EmptyQuarter, "global_inflation: no quarter has a contributing country");
  Vector out = Vector::Constant(T, kNaN);
  for (Index t = first; t <= last; ++t) {
    if (count(t) == 0) fail(ErrorCode::EmptyQuarter, "global_inflation: no country reports " + panel.date(t).text());
    out(t) = sum(t) / count(t);
  }
  return out;
}

void CountryStudyConfig::validate() const {
  if (h < 1) fail(ErrorCode::InvalidArgument, "study: h must be >= 1");
  if (!(pi0 > 0.0 && pi0 < 1.0)) fail(ErrorCode::InvalidArgument, "study: pi0 must lie in (0, 1)");
  if (p2 < 0) fail(ErrorCode::InvalidArgument, "study: p2 must be >= 0");
  if (p_max < 0) fail(ErrorCode::InvalidArgument, "study: p_max must be >= 0");
  if (mu0_list.empty()) fail(ErrorCode::InvalidArgument, "study: mu0 list must not be empty");
  for (const double mu0 : mu0_list) SplitSpec::validate_fraction(mu0);
}

CountryDesign build_country_design(const InflationPanel& panel, Index country, const CountryStudyConfig& config) {
  config.validate();
  if (country < 0 || country >= panel.country_count()) fail(ErrorCode::InvalidArgument, "study: no such country");
  const auto& cov = panel.coverage(country);
  const Index Ti = cov.length();
  const Vector prices = panel.country_prices(country);
  const Vector pih = annualized_inflation(prices, config.h);
  const Vector pi1 = annualized_inflation(prices, 1);
  const Vector g_panel = global_inflation(panel, config.exclude_own ? std::optional<Index>(country) : std::nullopt);
  const Vector g = g_panel.segment(cov.first, Ti);

  Index g_first = 0;
  while (g_first < Ti && std::isnan(g(g_first))) ++g_first;
  for (Index t = g_first; t < Ti; ++t) {
    if (std::isnan(g(t))) {
      fail(ErrorCode::CoverageError, "global inflation is unavailable at " + panel.date(cov.first + t).text());
    }
  }

  CountryDesign d;
  d.block_first = cov.first;
  d.selected_lag = bic_select_lag(std::span<const double>(pih.data(), static_cast<std::size_t>(Ti)),
                                  std::span<const double>(pi1.data(), static_cast<std::size_t>(Ti)), config.h,
                                  config.p_max);
  const int p1 = d.selected_lag;
  d.benchmark_columns = 1 + (p1 + 1);
  const Index cols = d.benchmark_columns + (config.p2 + 1);
  d.first_row = std::max<Index>(1 + p1, g_first + config.p2);
  if (d.first_row >= Ti) fail(ErrorCode::InsufficientData, "too few quarters for the requested lags");

  // Row t holds regressors dated t, t-1, ...; the design pairs it with target t + h.
  d.predictors = Matrix::Constant(Ti, cols, kNaN);
  for (Index t = d.first_row; t < Ti; ++t) {
    d.predictors(t, 0) = 1.0;
    for (int j = 0; j <= p1; ++j) d.predictors(t, 1 + j) = pi1(t - j);
    for (int j = 0; j <= config.p2; ++j) d.predictors(t, d.benchmark_columns + j) = g(t - j);
  }
  d.target = pih;
  return d;
}

CountryResult country_encompassing(const InflationPanel& panel, Index country, const CountryStudyConfig& config) {
  const std::string code =
      country >= 0 && country < panel.country_count() ? panel.countries()[static_cast<std::size_t>(country)] : "?";
  try {
    const CountryDesign d = build_country_design(panel, country, config);
    const Index Ti = d.target.size();
    const Index k0 = first_origin(Ti, config.pi0);
    const DirectDesign design(d.predictors, d.target, config.h, d.first_row);
    NestedErrors e = nested_forecast_errors(design, d.benchmark_columns, k0);
    const ForecastErrorSet errors(std::move(e.benchmark), std::move(e.large), config.h, k0);

    const double mse1 = sample_mse(errors.e1());
    const double mse2 = sample_mse(errors.e2());
    if (!(mse1 > 0.0)) fail(ErrorCode::DegenerateVariance, "benchmark forecasts are exact");

    CountryResult r;
    r.country = code;
    r.rmse_ratio = std::sqrt(mse2 / mse1);
    r.selected_lag = d.selected_lag;
    r.n_forecasts = errors.n();
    r.first_target = panel.date(d.block_first + k0 + config.h - 1);
    r.last_target = panel.date(d.block_first + Ti - 1);
    for (const double mu0 : config.mu0_list) {
      const EncompassingResult t = encompassing_test(errors, mu0, config.hac);
      r.mu0.push_back(mu0);
      r.p_values.push_back(t.p_value);
      r.statistics.push_back(t.statistic);
    }
    return r;
  } catch (const Error& e) {
    fail(e.code(), code + ": " + e.what());
  }
}

CountryResult country_encompassing(const InflationPanel& panel, const std::string& country,
                                   const CountryStudyConfig& config) {
  const Index c = panel.find(country);
  if (c < 0) fail(ErrorCode::InvalidArgument, "country '" + country + "' is not in the panel");
  return country_encompassing(panel, c, config);
}

Study run_study(const InflationPanel& panel, const CountryStudyConfig& config, int threads) {
  config.validate();
  Study study;
  study.config = config;
  study.rows.resize(static_cast<std::size_t>(panel.country_count()));
  detail::parallel_for(study.rows.size(), threads, [&](std::size_t c) {
    StudyRow& row = study.rows[c];
    row.country = panel.countries()[c];
    try {
      row.result = country_encompassing(panel, static_cast<Index>(c), config);
    } catch (const Error& e) {
      row.error = e.code();
      row.message = e.what();
    }
  });
  return study;
}

namespace {

std::string mu0_tag(double mu0) { return format_fixed(mu0, 2); }

std::string bold_if(bool condition, const std::string& text) { return condition ? "**" + text + "**" : text; }

std::string render_study_markdown(const Study& study) {
  const auto& mus = study.config.mu0_list;
  std::ostringstream out;
  out << "| country | RMSE ratio |";
  for (const double mu0 : mus) out << " p (mu0=" << mu0_tag(mu0) << ") |";
  out << " lag | forecasts |\n|---|---|";
  for (std::size_t i = 0; i < mus.size(); ++i) out << "---|";
  out << "---|---|\n";
  for (const StudyRow& row : study.rows) {
    out << "| " << row.country << " |";
    if (!row.result) {
      out << " error: " << row.message << " |";
      for (std::size_t i = 0; i < mus.size() + 2; ++i) out << " |";
      out << '\n';
      continue;
    }
    const CountryResult& r = *row.result;
    out << ' ' << bold_if(r.rmse_ratio < 1.0, format_fixed(r.rmse_ratio, 3)) << " |";
    for (const double p : r.p_values) out << ' ' << bold_if(p < 0.10, format_fixed(p, 3)) << " |";
    out << ' ' << r.selected_lag << " | " << r.n_forecasts << " |\n";
  }
  out << "\nh = " << study.config.h << ", pi0 = " << format_shortest(study.config.pi0)
      << ", p2 = " << study.config.p2 << ", p_max = " << study.config.p_max;
  if (study.config.exclude_own) out << ", global average excludes the own country";
  if (study.config.hac.centering() == HacConfig::Centering::Full) out << ", full-sample HAC centering";
  out << ". Bold: RMSE ratio below 1 or p-value below 0.10.\n";
  return out.str();
}

std::string render_study_csv(const Study& study) {
  std::ostringstream out;
  out << "country,rmse_ratio";
  for (const double mu0 : study.config.mu0_list) out << ",p_mu0_" << mu0_tag(mu0);
  for (const double mu0 : study.config.mu0_list) out << ",stat_mu0_" << mu0_tag(mu0);
  out << ",selected_lag,n_forecasts,first_target,last_target,error_code,error\n";
  for (const StudyRow& row : study.rows) {
    out << row.country << ',';
    const std::size_t k = study.config.mu0_list.size();
    if (row.result) {
      const CountryResult& r = *row.result;
      out << format_shortest(r.rmse_ratio);
      for (const double p : r.p_values) out << ',' << format_shortest(p);
      for (const double s : r.statistics) out << ',' << format_shortest(s);
      out << ',' << r.selected_lag << ',' << r.n_forecasts << ',' << r.first_target.text() << ','
          << r.last_target.text() << ",,\n";
    } else {
      for (std::size_t i = 0; i < 2 * k + 4; ++i) out << ',';
      out << error_code_name(*row.error) << ',' << csv_field(row.message) << '\n';
    }
  }
  return out.str();
}

std::string render_study_json(const Study& study) {
  nlohmann::ordered_json root;
  root["h"] = study.config.h;
  root["pi0"] = study.config.pi0;
  root["p2"] = study.config.p2;
  root["p_max"] = study.config.p_max;
  root["exclude_own"] = study.config.exclude_own;
  root["mu0"] = study.config.mu0_list;
  auto rows = nlohmann::ordered_json::array();
  for (const StudyRow& row : study.rows) {
    nlohmann::ordered_json j;
    j["country"] = row.country;
    if (row.result) {
      const CountryResult& r = *row.result;
      j["rmse_ratio"] = r.rmse_ratio;
      j["p_values"] = r.p_values;
      j["statistics"] = r.statistics;
      j["selected_lag"] = r.selected_lag;
      j["n_forecasts"] = r.n_forecasts;
      j["first_target"] = r.first_target.text();
      j["last_target"] = r.last_target.text();
    } else {
      j["error_code"] = std::string(error_code_name(*row.error));
      j["error"] = row.message;
    }
    rows.push_back(std::move(j));
  }
  root["countries"] = std::move(rows);
  return root.dump(2) + "\n";
}

}  // namespace

std::string render_study(const Study& study, ReportFormat format) {
  if (study.rows.empty()) fail(ErrorCode::InvalidArgument, "cannot render a study without countries");
  switch (format) {
    case ReportFormat::Csv: return render_study_csv(study);
    case ReportFormat::Json: return render_study_json(study);
    case ReportFormat::Markdown: return render_study_markdown(study);
  }
  fail(ErrorCode::InvalidArgument, "unknown report format");
}

}  // namespace fenc
