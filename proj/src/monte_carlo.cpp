#include "fenc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "fenc/config.hpp"
#include "fenc/error.hpp"
#include "fenc/normal.hpp"
#include "parallel.hpp"
#include "fenc/regression.hpp"

namespace fenc {

namespace {

constexpr double kUnreliableShare = 0.01;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

const char* sigma_tag(const Eigen::Matrix2d& sigma) {
  if (sigma == sigma_uncorrelated()) return "S1";
  if (sigma == sigma_correlated()) return "S2";
  return "custom";
}

std::string kind_name(ExperimentKind kind) { return kind == ExperimentKind::Size ? "size" : "power"; }

std::string two_decimals(double v) { return format_fixed(v, 2); }

// Outcome codes stored per (cell, rep).
enum : signed char { kAccept = 0, kReject = 1, kFailed = 2 };

McReport run_cells(std::span<const McCell> cells, std::int64_t reps, std::uint64_t base_seed, int threads,
                   ExperimentKind kind) {
  if (cells.empty()) fail(ErrorCode::InvalidArgument, "experiment needs at least one cell");
  if (reps < 1) fail(ErrorCode::InvalidArgument, "reps must be >= 1");
  for (const McCell& cell : cells) {
    cell.validate();
    if (kind == ExperimentKind::Size && cell.beta2() != 0.0) {
      fail(ErrorCode::InvalidSpec, "size experiment cell '" + cell.default_label() + "' must have beta2 = 0");
    }
    if (kind == ExperimentKind::Power && !(cell.beta2() >= 0.0)) {
      fail(ErrorCode::InvalidSpec, "power experiment cell '" + cell.default_label() + "' must have beta2 >= 0");
    }
  }

  // Cells that share simulated data are evaluated on the same draw.
  std::vector<std::uint64_t> group_streams;
  std::vector<std::vector<std::size_t>> groups;
  {
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::uint64_t key = data_key(cells[c]);
      const auto [it, inserted] = index.emplace(key, groups.size());
      if (inserted) {
        group_streams.push_back(shock_key(cells[c]));
        groups.emplace_back();
      }
      groups[it->second].push_back(c);
    }
  }

  const auto n_reps = static_cast<std::size_t>(reps);
  std::vector<signed char> outcome(cells.size() * n_reps, kFailed);
  detail::parallel_for(groups.size() * n_reps, threads, [&](std::size_t item) {
    const std::size_t g = item / n_reps;
    const std::size_t rep = item % n_reps;
    const RngStream rng(base_seed, replication_stream(group_streams[g], rep));
    const McCell& lead = cells[groups[g].front()];
    std::optional<ForecastErrorSet> errors;
    try {
      errors.emplace(simulate_forecast_errors(lead, rng));
    } catch (const Error&) {
      return;  // every cell in the group records a failure
    }
    for (const std::size_t c : groups[g]) {
      try {
        const McCell& cell = cells[c];
        const EncompassingResult r = encompassing_test(*errors, cell.mu0, cell.hac);
        outcome[c * n_reps + rep] = r.statistic > normal_quantile(1.0 - cell.level) ? kReject : kAccept;
      } catch (const Error&) {
        outcome[c * n_reps + rep] = kFailed;
      }
    }
  });

  McReport report;
  report.kind = kind;
  report.base_seed = base_seed;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellReport cr;
    cr.cell = cells[c];
    cr.label = cells[c].label.empty() ? cells[c].default_label() : cells[c].label;
    cr.reps = reps;
    for (std::size_t r = 0; r < n_reps; ++r) {
      const signed char o = outcome[c * n_reps + r];
      if (o == kReject) ++cr.rejections;
      if (o == kFailed) ++cr.failures;
    }
    const std::int64_t completed = reps - cr.failures;
    const double p = completed > 0 ? static_cast<double>(cr.rejections) / static_cast<double>(completed) : 0.0;
    cr.rejection_frequency = p;
    cr.mc_standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    cr.unreliable = static_cast<double>(cr.failures) >= kUnreliableShare * static_cast<double>(reps);
    report.cells.push_back(std::move(cr));
  }
  return report;
}

// ---- rendering -------------------------------------------------------------

struct Descriptor {
  std::string model;
  std::string sigma;
  Index T = 0;
  Index N = 0;
  int h = 0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double beta2 = 0.0;
};

Descriptor describe_cell(const McCell& cell) {
  Descriptor d;
  d.T = cell.periods();
  d.h = cell.horizon();
  d.beta2 = cell.beta2();
  if (const auto* s = std::get_if<Dgp1Spec>(&cell.dgp)) {
    d.model = "dgp1";
    d.sigma = sigma_tag(s->sigma);
    d.rho = s->rho;
  } else {
    const auto& s2 = std::get<Dgp2Spec>(cell.dgp);
    d.model = "dgp2";
    d.N = s2.N;
  }
  return d;
}

std::string bandwidth_text(const HacConfig& hac, Index n) {
  return hac.is_fixed() ? std::to_string(hac.bandwidth(n)) : "auto(c=" + format_shortest(hac.constant()) + ")";
}

const char* const kCsvHeader =
    "label,reps,rejection_frequency,mc_se,failures,rejections,unreliable,model,sigma,T,N,h,rho,beta2,mu0,pi0,"
    "level,bandwidth,centering";

std::string render_csv(const McReport& report) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const CellReport& cr : report.cells) {
    const Descriptor d = describe_cell(cr.cell);
    out << csv_field(cr.label) << ',' << cr.reps << ',' << format_shortest(cr.rejection_frequency) << ','
        << format_shortest(cr.mc_standard_error) << ',' << cr.failures << ',' << cr.rejections << ','
        << (cr.unreliable ? "true" : "false") << ',' << d.model << ',' << d.sigma << ',' << d.T << ','
        << (d.N > 0 ? std::to_string(d.N) : "") << ',' << d.h << ','
        << (std::isnan(d.rho) ? "" : format_shortest(d.rho)) << ',' << format_shortest(d.beta2) << ','
        << format_shortest(cr.cell.mu0) << ',' << format_shortest(cr.cell.pi0) << ','
        << format_shortest(cr.cell.level) << ',' << csv_field(bandwidth_text(cr.cell.hac, cr.cell.forecasts()))
        << ',' << centering_name(cr.cell.hac.centering()) << '\n';
  }
  return out.str();
}

std::string render_json(const McReport& report) {
  nlohmann::ordered_json root;
  root["kind"] = kind_name(report.kind);
  root["seed"] = report.base_seed;
  auto cells = nlohmann::ordered_json::array();
  for (const CellReport& cr : report.cells) {
    const Descriptor d = describe_cell(cr.cell);
    nlohmann::ordered_json j;
    j["label"] = cr.label;
    j["reps"] = cr.reps;
    j["rejection_frequency"] = cr.rejection_frequency;
    j["mc_se"] = cr.mc_standard_error;
    j["failures"] = cr.failures;
    j["rejections"] = cr.rejections;
    j["unreliable"] = cr.unreliable;
    j["model"] = d.model;
    if (!d.sigma.empty()) j["sigma"] = d.sigma;
    j["T"] = d.T;
    if (d.N > 0) j["N"] = d.N;
    j["h"] = d.h;
    if (!std::isnan(d.rho)) j["rho"] = d.rho;
    j["beta2"] = d.beta2;
    j["mu0"] = cr.cell.mu0;
    j["pi0"] = cr.cell.pi0;
    j["level"] = cr.cell.level;
    j["bandwidth"] = bandwidth_text(cr.cell.hac, cr.cell.forecasts());
    j["centering"] = centering_name(cr.cell.hac.centering());
    cells.push_back(std::move(j));
  }
  root["cells"] = std::move(cells);
  return root.dump(2) + "\n";
}

// Pivot coordinates of one cell in the printed table.
struct Slot {
  std::string section;
  std::string row;
  std::string column;
};

Slot slot_of(const CellReport& cr, ExperimentKind kind) {
  const Descriptor d = describe_cell(cr.cell);
  const std::string mu = "mu0=" + two_decimals(cr.cell.mu0);
  const std::string beta = "beta2=" + two_decimals(d.beta2);
  const std::string nt = "(N,T)=(" + std::to_string(d.N) + "," + std::to_string(d.T) + ")";
  Slot s;
  if (d.model == "dgp1") {
    const std::string title = d.sigma == "custom" ? "DGP1" : "DGP1(" + d.sigma + ")";
    s.section = title + ", h=" + std::to_string(d.h);
    s.row = kind == ExperimentKind::Size ? "T=" + std::to_string(d.T) : beta;
    if (kind == ExperimentKind::Power) s.section += ", T=" + std::to_string(d.T);
    s.column = "rho=" + two_decimals(d.rho) + " " + mu;
  } else if (kind == ExperimentKind::Size) {
    s.section = "DGP2, " + nt;
    s.row = "h=" + std::to_string(d.h);
    s.column = mu;
  } else {
    s.section = "DGP2, h=" + std::to_string(d.h);
    s.row = beta;
    s.column = nt + " " + mu;
  }
  return s;
}

std::string cell_text(const CellReport& cr) {
  return format_fixed(cr.rejection_frequency, 3) + (cr.unreliable ? "†" : "");
}

void append_row(std::ostringstream& out, const std::vector<std::string>& fields) {
  out << '|';
  for (const auto& f : fields) out << ' ' << f << " |";
  out << '\n';
}

std::string render_markdown(const McReport& report) {
  std::ostringstream out;
  out << "# Empirical " << kind_name(report.kind) << " (seed " << report.base_seed << ")\n";

  std::vector<Slot> slots;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> seen;
  bool pivot = true;
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    slots.push_back(slot_of(report.cells[i], report.kind));
    const Slot& s = slots.back();
    if (!seen.emplace(std::make_tuple(s.section, s.row, s.column), i).second) pivot = false;
  }

  if (pivot) {
    std::vector<std::string> sections;
    for (const Slot& s : slots) {
      if (std::find(sections.begin(), sections.end(), s.section) == sections.end()) sections.push_back(s.section);
    }
    for (const std::string& section : sections) {
      std::vector<std::string> rows;
      std::vector<std::string> columns;
      for (const Slot& s : slots) {
        if (s.section != section) continue;
        if (std::find(rows.begin(), rows.end(), s.row) == rows.end()) rows.push_back(s.row);
        if (std::find(columns.begin(), columns.end(), s.column) == columns.end()) columns.push_back(s.column);
      }
      out << "\n## " << section << "\n\n";
      std::vector<std::string> header{""};
      header.insert(header.end(), columns.begin(), columns.end());
      append_row(out, header);
      append_row(out, std::vector<std::string>(header.size(), "---"));
      for (const std::string& row : rows) {
        std::vector<std::string> fields{row};
        for (const std::string& column : columns) {
          const auto it = seen.find(std::make_tuple(section, row, column));
          fields.push_back(it == seen.end() ? "" : cell_text(report.cells[it->second]));
        }
        append_row(out, fields);
      }
    }
  } else {
    out << '\n';
    append_row(out, {"label", "rejection_frequency", "mc_se", "failures"});
    append_row(out, {"---", "---", "---", "---"});
    for (const CellReport& cr : report.cells) {
      append_row(out, {cr.label, cell_text(cr), format_fixed(cr.mc_standard_error, 4), std::to_string(cr.failures)});
    }
  }

  const auto any_unreliable =
      std::any_of(report.cells.begin(), report.cells.end(), [](const CellReport& c) { return c.unreliable; });
  out << "\nReplications per cell: " << report.cells.front().reps << ".";
  if (any_unreliable) out << " † marks cells where at least 1% of replications failed.";
  out << '\n';
  return out.str();
}

std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
}

std::int64_t parse_int(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad integer '" + text + "'");
}

}  // namespace

// ---- cells -------------------------------------------------------------------

Index McCell::periods() const {
  return std::visit([](const auto& s) { return s.T; }, dgp);
}

int McCell::horizon() const {
  return std::visit([](const auto& s) { return s.h; }, dgp);
}

double McCell::beta2() const {
  return std::visit([](const auto& s) { return s.beta2; }, dgp);
}

Index McCell::forecasts() const { return periods() - horizon() - first_origin(periods(), pi0) + 1; }

void McCell::validate() const {
  std::visit([](const auto& s) { s.validate(); }, dgp);
  if (!(pi0 > 0.0 && pi0 < 1.0)) fail(ErrorCode::InvalidSpec, "pi0 must lie in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidSpec, "level must lie in (0, 1)");
  SplitSpec::validate_fraction(mu0);
  const Index k0 = first_origin(periods(), pi0);
  // Three regressors need at least three pairs at the first origin.
  if (k0 < horizon() + 3) fail(ErrorCode::InvalidSpec, "T * pi0 leaves too few observations for the first estimate");
  const Index n = forecasts();
  if (n < ForecastErrorSet::kMinSize) fail(ErrorCode::InvalidSpec, "design yields fewer than 10 forecasts");
  SplitSpec(mu0, n);
  hac.bandwidth(n);
}

std::string McCell::default_label() const {
  std::ostringstream out;
  if (const auto* s = std::get_if<Dgp1Spec>(&dgp)) {
    out << "dgp1(" << sigma_tag(s->sigma) << ") T=" << s->T << " h=" << s->h << " rho=" << format_shortest(s->rho);
  } else {
    const auto& s2 = std::get<Dgp2Spec>(dgp);
    out << "dgp2 N=" << s2.N << " T=" << s2.T << " h=" << s2.h;
  }
  out << " beta2=" << format_shortest(beta2()) << " mu0=" << format_shortest(mu0);
  return out.str();
}

namespace {

std::string cell_key_text(const McCell& cell, bool with_slopes) {
  std::ostringstream key;
  key << "pi0=" << format_shortest(cell.pi0) << ';';
  if (const auto* s = std::get_if<Dgp1Spec>(&cell.dgp)) {
    key << "dgp1;" << format_shortest(s->beta1) << ';' << format_shortest(s->theta) << ';';
    if (with_slopes) key << format_shortest(s->beta2) << ';' << format_shortest(s->rho) << ';';
    for (int i = 0; i < 4; ++i) key << format_shortest(s->sigma(i / 2, i % 2)) << ';';
    key << s->T << ';' << s->h << ';' << s->burn_in;
  } else {
    const auto& s2 = std::get<Dgp2Spec>(cell.dgp);
    key << "dgp2;" << format_shortest(s2.alpha) << ';' << format_shortest(s2.beta1) << ';';
    if (with_slopes) key << format_shortest(s2.beta2) << ';';
    key << format_shortest(s2.theta) << ';' << s2.N << ';' << s2.T << ';' << s2.h << ';'
        << format_shortest(s2.alpha1) << ';' << format_shortest(s2.rho_i) << ';' << format_shortest(s2.loading_std)
        << ';' << format_shortest(s2.idio_std) << ';' << s2.burn_in;
  }
  return key.str();
}

}  // namespace

std::uint64_t data_key(const McCell& cell) { return fnv1a(cell_key_text(cell, true)); }

std::uint64_t shock_key(const McCell& cell) { return fnv1a(cell_key_text(cell, false)); }

ForecastErrorSet simulate_forecast_errors(const McCell& cell, const RngStream& rng) {
  Vector y;
  Vector extra;
  if (const auto* s = std::get_if<Dgp1Spec>(&cell.dgp)) {
    Dgp1Path path = simulate_dgp1(*s, rng);
    y = std::move(path.y);
    extra = std::move(path.x);
  } else {
    Dgp2Path path = simulate_dgp2(std::get<Dgp2Spec>(cell.dgp), rng);
    extra = estimate_factor(path.X);
    y = std::move(path.y);
  }
  const Index T = y.size();
  Matrix predictors(T, 3);
  predictors.col(0).setOnes();
  predictors.col(1) = y;
  predictors.col(2) = extra;
  const int h = cell.horizon();
  const Index k0 = first_origin(T, cell.pi0);
  const DirectDesign design(std::move(predictors), std::move(y), h);
  NestedErrors e = nested_forecast_errors(design, 2, k0);
  return ForecastErrorSet(std::move(e.benchmark), std::move(e.large), h, k0);
}

ReplicationOutcome run_replication(const McCell& cell, std::uint64_t rep_id, std::uint64_t base_seed) {
  cell.validate();
  const RngStream rng(base_seed, replication_stream(shock_key(cell), rep_id));
  const ForecastErrorSet errors = simulate_forecast_errors(cell, rng);
  const EncompassingResult r = encompassing_test(errors, cell.mu0, cell.hac);
  return {r.statistic > normal_quantile(1.0 - cell.level), r.statistic};
}

McReport run_size_experiment(std::span<const McCell> cells, std::int64_t reps, std::uint64_t base_seed,
                             int threads) {
  return run_cells(cells, reps, base_seed, threads, ExperimentKind::Size);
}

McReport run_power_experiment(std::span<const McCell> cells, std::int64_t reps, std::uint64_t base_seed,
                              int threads) {
  return run_cells(cells, reps, base_seed, threads, ExperimentKind::Power);
}

std::vector<double> simulate_statistics(const McCell& cell, std::int64_t reps, std::uint64_t base_seed,
                                        int threads) {
  cell.validate();
  if (reps < 1) fail(ErrorCode::InvalidArgument, "reps must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(reps), std::numeric_limits<double>::quiet_NaN());
  const std::uint64_t key = shock_key(cell);
  detail::parallel_for(out.size(), threads, [&](std::size_t rep) {
    try {
      const RngStream rng(base_seed, replication_stream(key, rep));
      out[rep] = encompassing_test(simulate_forecast_errors(cell, rng), cell.mu0, cell.hac).statistic;
    } catch (const Error&) {
    }
  });
  return out;
}

std::string render_report(const McReport& report, ReportFormat format) {
  if (report.cells.empty()) fail(ErrorCode::InvalidArgument, "cannot render a report without cells");
  switch (format) {
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Markdown: return render_markdown(report);
  }
  fail(ErrorCode::InvalidArgument, "unknown report format");
}

std::vector<CsvCellRow> parse_report_csv(std::string_view text) {
  std::vector<CsvCellRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (header.empty()) {
      header = std::move(fields);
      const std::vector<std::string> expected{"label", "reps", "rejection_frequency", "mc_se", "failures"};
      if (header.size() < expected.size() || !std::equal(expected.begin(), expected.end(), header.begin())) {
        fail(ErrorCode::ParseError, "line 1: unexpected report header");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(header.size()) + " fields");
    }
    CsvCellRow row;
    row.label = fields[0];
    row.reps = parse_int(fields[1], line_no);
    row.rejection_frequency = parse_double(fields[2], line_no);
    row.mc_standard_error = parse_double(fields[3], line_no);
    row.failures = parse_int(fields[4], line_no);
    rows.push_back(std::move(row));
  }
  if (header.empty()) fail(ErrorCode::ParseError, "empty report");
  return rows;
}

// ---- experiment files ----------------------------------------------------------

namespace {

template <class T>
T checked_int(ConfigDocument& doc, const std::string& key, double value, long long lo) {
  if (value != std::floor(value) || value < static_cast<double>(lo)) {
    fail(ErrorCode::ConfigError, doc.source() + ": " + key + ": expected an integer >= " + std::to_string(lo));
  }
  return static_cast<T>(value);
}

}  // namespace

Experiment parse_experiment(std::string_view text, std::string source) {
  ConfigDocument doc = ConfigDocument::parse(text, std::move(source));
  Experiment ex;
  ex.source = doc.source();
  const std::string kind = doc.string("kind", "size");
  if (kind == "size") {
    ex.kind = ExperimentKind::Size;
  } else if (kind == "power") {
    ex.kind = ExperimentKind::Power;
  } else {
    fail(ErrorCode::ConfigError, ex.source + ": kind: expected \"size\" or \"power\"");
  }
  ex.reps = doc.integer("reps", 10000);
  if (ex.reps < 1) fail(ErrorCode::ConfigError, ex.source + ": reps: must be >= 1");
  const long long seed = doc.integer("seed", 20240601);
  if (seed < 0) fail(ErrorCode::ConfigError, ex.source + ": seed: must be >= 0");
  ex.seed = static_cast<std::uint64_t>(seed);

  McCell base;
  base.level = doc.number("test.level", 0.10);
  base.pi0 = doc.number("test.pi0", 0.25);
  if (doc.has("test.bandwidth") && doc.has("test.bandwidth_c")) {
    fail(ErrorCode::ConfigError, ex.source + ": test.bandwidth: conflicts with test.bandwidth_c");
  }
  if (doc.has("test.bandwidth")) {
    const long long lags = doc.integer("test.bandwidth", 1);
    if (lags < 1) fail(ErrorCode::ConfigError, ex.source + ": test.bandwidth: must be >= 1");
    base.hac = HacConfig::fixed(lags);
  } else {
    const double c = doc.number("test.bandwidth_c", 1.0);
    if (!(c > 0.0)) fail(ErrorCode::ConfigError, ex.source + ": test.bandwidth_c: must be > 0");
    base.hac = HacConfig::automatic(c);
  }
  const std::string centering = doc.string("test.centering", "segment");
  if (centering != "segment" && centering != "full") {
    fail(ErrorCode::ConfigError, ex.source + ": test.centering: must be \"segment\" or \"full\"");
  }
  base.hac = base.hac.with_centering(parse_centering(centering));

  const std::string model = doc.string("dgp.model", "dgp1");
  const std::vector<double> default_mu0{0.30, 0.35, 0.40, 0.45};
  const std::vector<double> mu0s = doc.numbers("grid.mu0", default_mu0);
  const std::vector<double> hs = doc.numbers("grid.h", {1.0});
  const std::vector<double> beta2s =
      doc.numbers("grid.beta2", ex.kind == ExperimentKind::Size ? std::vector<double>{0.0} : std::vector<double>{0.1});

  if (model == "dgp1") {
    Dgp1Spec spec;
    spec.beta1 = doc.number("dgp.beta1", spec.beta1);
    spec.theta = doc.number("dgp.theta", spec.theta);
    spec.burn_in = doc.integer("dgp.burn_in", spec.burn_in);
    const auto sigma = doc.number_rows("dgp.sigma", {{1.0, 0.0}, {0.0, 0.25}});
    if (sigma.size() != 2 || sigma[0].size() != 2 || sigma[1].size() != 2) {
      fail(ErrorCode::ConfigError, ex.source + ": dgp.sigma: expected a 2x2 array");
    }
    spec.sigma << sigma[0][0], sigma[0][1], sigma[1][0], sigma[1][1];
    const std::vector<double> Ts =
        doc.numbers("grid.T", {ex.kind == ExperimentKind::Size ? 1000.0 : 500.0});
    const std::vector<double> rhos = doc.numbers("grid.rho", {0.25});
    for (const double h : hs) {
      for (const double T : Ts) {
        for (const double b2 : beta2s) {
          for (const double rho : rhos) {
            for (const double mu0 : mu0s) {
              McCell cell = base;
              Dgp1Spec s = spec;
              s.h = checked_int<int>(doc, "grid.h", h, 1);
              s.T = checked_int<Index>(doc, "grid.T", T, 1);
              s.beta2 = b2;
              s.rho = rho;
              cell.dgp = s;
              cell.mu0 = mu0;
              cell.label = cell.default_label();
              ex.cells.push_back(std::move(cell));
            }
          }
        }
      }
    }
  } else if (model == "dgp2") {
    Dgp2Spec spec;
    spec.alpha = doc.number("dgp.alpha", spec.alpha);
    spec.beta1 = doc.number("dgp.beta1", spec.beta1);
    spec.theta = doc.number("dgp.theta", spec.theta);
    spec.alpha1 = doc.number("dgp.alpha1", spec.alpha1);
    spec.rho_i = doc.number("dgp.rho_i", spec.rho_i);
    spec.loading_std = doc.number("dgp.loading_std", spec.loading_std);
    spec.idio_std = doc.number("dgp.idio_std", spec.idio_std);
    spec.burn_in = doc.integer("dgp.burn_in", spec.burn_in);
    const auto nts = doc.number_rows("grid.NT", {{100.0, 250.0}});
    for (const auto& nt : nts) {
      if (nt.size() != 2) fail(ErrorCode::ConfigError, ex.source + ": grid.NT: expected [N, T] pairs");
    }
    for (const auto& nt : nts) {
      for (const double h : hs) {
        for (const double b2 : beta2s) {
          for (const double mu0 : mu0s) {
            McCell cell = base;
            Dgp2Spec s = spec;
            s.N = checked_int<Index>(doc, "grid.NT", nt[0], 1);
            s.T = checked_int<Index>(doc, "grid.NT", nt[1], 1);
            s.h = checked_int<int>(doc, "grid.h", h, 1);
            s.beta2 = b2;
            cell.dgp = s;
            cell.mu0 = mu0;
            cell.label = cell.default_label();
            ex.cells.push_back(std::move(cell));
          }
        }
      }
    }
  } else {
    fail(ErrorCode::ConfigError, ex.source + ": dgp.model: expected \"dgp1\" or \"dgp2\"");
  }
  doc.finish();

  for (const McCell& cell : ex.cells) {
    try {
      cell.validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, ex.source + ": cell '" + cell.label + "': " + e.what());
    }
    if (ex.kind == ExperimentKind::Size && cell.beta2() != 0.0) {
      fail(ErrorCode::ConfigError, ex.source + ": grid.beta2: size experiments require beta2 = 0");
    }
    if (ex.kind == ExperimentKind::Power && !(cell.beta2() >= 0.0)) {
      fail(ErrorCode::ConfigError, ex.source + ": grid.beta2: power experiments require beta2 >= 0");
    }
  }
  return ex;
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment(buffer.str(), path);
}

std::string describe_experiment(const Experiment& ex) {
  std::ostringstream out;
  out << "source = " << ex.source << '\n';
  out << "kind = " << kind_name(ex.kind) << '\n';
  out << "reps = " << ex.reps << '\n';
  out << "seed = " << ex.seed << '\n';
  out << "cells = " << ex.cells.size() << '\n';
  if (!ex.cells.empty()) {
    const McCell& c = ex.cells.front();
    out << "test.level = " << format_shortest(c.level) << '\n';
    out << "test.pi0 = " << format_shortest(c.pi0) << '\n';
    if (c.hac.is_fixed()) {
      out << "test.bandwidth = " << c.hac.bandwidth(c.forecasts()) << '\n';
    } else {
      out << "test.bandwidth_c = " << format_shortest(c.hac.constant()) << '\n';
    }
    out << "test.centering = " << centering_name(c.hac.centering()) << '\n';
    if (const auto* s = std::get_if<Dgp1Spec>(&c.dgp)) {
      out << "dgp.model = dgp1\n";
      out << "dgp.beta1 = " << format_shortest(s->beta1) << '\n';
      out << "dgp.theta = " << format_shortest(s->theta) << '\n';
      out << "dgp.sigma = [[" << format_shortest(s->sigma(0, 0)) << ", " << format_shortest(s->sigma(0, 1))
          << "], [" << format_shortest(s->sigma(1, 0)) << ", " << format_shortest(s->sigma(1, 1)) << "]]\n";
      out << "dgp.burn_in = " << s->burn_in << '\n';
    } else {
      const auto& s2 = std::get<Dgp2Spec>(c.dgp);
      out << "dgp.model = dgp2\n";
      out << "dgp.alpha = " << format_shortest(s2.alpha) << '\n';
      out << "dgp.beta1 = " << format_shortest(s2.beta1) << '\n';
      out << "dgp.theta = " << format_shortest(s2.theta) << '\n';
      out << "dgp.alpha1 = " << format_shortest(s2.alpha1) << '\n';
      out << "dgp.rho_i = " << format_shortest(s2.rho_i) << '\n';
      out << "dgp.loading_std = " << format_shortest(s2.loading_std) << '\n';
      out << "dgp.idio_std = " << format_shortest(s2.idio_std) << '\n';
      out << "dgp.burn_in = " << s2.burn_in << '\n';
    }
  }
  for (const McCell& c : ex.cells) out << "cell = " << c.label << '\n';
  return out.str();
}

McReport run_experiment(const Experiment& ex, int threads) {
  return run_cells(ex.cells, ex.reps, ex.seed, threads, ex.kind);
}

}  // namespace fenc
