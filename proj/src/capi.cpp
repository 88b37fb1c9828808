#include "fenc/fenc.h"

#include <exception>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "fenc/encompassing.hpp"
#include "fenc/error.hpp"
#include "fenc/errors_io.hpp"
#include "fenc/format.hpp"
#include "fenc/inflation.hpp"
#include "fenc/local_power.hpp"
#include "fenc/monte_carlo.hpp"
#include "json.hpp"

struct fenc_string {
  std::string text;
};

struct fenc_errors {
  fenc::ForecastErrorSet set;
};

struct fenc_experiment {
  fenc::Experiment experiment;
};

struct fenc_report {
  fenc::McReport report;
};

struct fenc_power_blocks {
  fenc::LocalPowerInput input;
};

struct fenc_panel {
  fenc::InflationPanel panel;
};

struct fenc_study {
  fenc::Study study;
};

namespace {

thread_local std::string last_error;

fenc_status to_status(fenc::ErrorCode code) {
  using fenc::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return FENC_E_INVALID_ARGUMENT;
    case ErrorCode::EmptyInput: return FENC_E_EMPTY_INPUT;
    case ErrorCode::RankDeficient: return FENC_E_RANK_DEFICIENT;
    case ErrorCode::InsufficientData: return FENC_E_INSUFFICIENT_DATA;
    case ErrorCode::InvalidSplit: return FENC_E_INVALID_SPLIT;
    case ErrorCode::BandwidthOutOfRange: return FENC_E_BANDWIDTH_OUT_OF_RANGE;
    case ErrorCode::DegenerateVariance: return FENC_E_DEGENERATE_VARIANCE;
    case ErrorCode::SingularBlock: return FENC_E_SINGULAR_BLOCK;
    case ErrorCode::InvalidSpec: return FENC_E_INVALID_SPEC;
    case ErrorCode::DegenerateSpectrum: return FENC_E_DEGENERATE_SPECTRUM;
    case ErrorCode::ParseError: return FENC_E_PARSE;
    case ErrorCode::CoverageError: return FENC_E_COVERAGE;
    case ErrorCode::NonPositivePrice: return FENC_E_NON_POSITIVE_PRICE;
    case ErrorCode::EmptyQuarter: return FENC_E_EMPTY_QUARTER;
    case ErrorCode::ConfigError: return FENC_E_CONFIG;
    case ErrorCode::IoError: return FENC_E_IO;
  }
  return FENC_E_INTERNAL;
}

fenc_status set_error(fenc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body() and converts exceptions into a status plus a thread-local message.
template <class Body>
fenc_status guarded(Body&& body) {
  try {
    body();
    return FENC_OK;
  } catch (const fenc::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FENC_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FENC_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(FENC_E_INTERNAL, "unknown failure");
  }
}

fenc_status null_error(const char* what) { return set_error(FENC_E_NULL_POINTER, std::string(what) + " is NULL"); }

fenc::HacConfig hac_from(int64_t bandwidth, double c, fenc_centering centering) {
  fenc::HacConfig hac = bandwidth > 0 ? fenc::HacConfig::fixed(bandwidth) : fenc::HacConfig::automatic(c);
  switch (centering) {
    case FENC_CENTERING_SEGMENT: return hac.with_centering(fenc::HacConfig::Centering::Segment);
    case FENC_CENTERING_FULL: return hac.with_centering(fenc::HacConfig::Centering::Full);
  }
  fenc::fail(fenc::ErrorCode::InvalidArgument, "unknown centering");
}

fenc::ReportFormat to_format(fenc_format format) {
  switch (format) {
    case FENC_FORMAT_MARKDOWN: return fenc::ReportFormat::Markdown;
    case FENC_FORMAT_CSV: return fenc::ReportFormat::Csv;
    case FENC_FORMAT_JSON: return fenc::ReportFormat::Json;
  }
  fenc::fail(fenc::ErrorCode::InvalidArgument, "unknown output format");
}

Eigen::MatrixXd json_matrix(const nlohmann::json& doc, const char* key, const std::string& path) {
  if (!doc.contains(key)) fenc::fail(fenc::ErrorCode::ParseError, path + ": missing \"" + key + "\"");
  const auto& rows = doc.at(key);
  if (!rows.is_array() || rows.empty()) fenc::fail(fenc::ErrorCode::ParseError, path + ": \"" + key + "\" must be a non-empty array");
  const bool nested = rows.front().is_array();
  const auto n_rows = static_cast<Eigen::Index>(nested ? rows.size() : 1);
  const auto n_cols = static_cast<Eigen::Index>(nested ? rows.front().size() : rows.size());
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = nested ? rows.at(static_cast<std::size_t>(i)) : rows;
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      fenc::fail(fenc::ErrorCode::ParseError, path + ": \"" + key + "\" rows must have equal length");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const auto& v = row.at(static_cast<std::size_t>(j));
      if (!v.is_number()) fenc::fail(fenc::ErrorCode::ParseError, path + ": \"" + key + "\" must hold numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

}  // namespace

extern "C" {

const char* fenc_version(void) { return "1.0.0"; }

const char* fenc_status_name(fenc_status status) {
  switch (status) {
    case FENC_OK: return "ok";
    case FENC_E_INVALID_ARGUMENT: return "invalid_argument";
    case FENC_E_EMPTY_INPUT: return "empty_input";
    case FENC_E_RANK_DEFICIENT: return "rank_deficient";
    case FENC_E_INSUFFICIENT_DATA: return "insufficient_data";
    case FENC_E_INVALID_SPLIT: return "invalid_split";
    case FENC_E_BANDWIDTH_OUT_OF_RANGE: return "bandwidth_out_of_range";
    case FENC_E_DEGENERATE_VARIANCE: return "degenerate_variance";
    case FENC_E_SINGULAR_BLOCK: return "singular_block";
    case FENC_E_INVALID_SPEC: return "invalid_spec";
    case FENC_E_DEGENERATE_SPECTRUM: return "degenerate_spectrum";
    case FENC_E_PARSE: return "parse_error";
    case FENC_E_COVERAGE: return "coverage_error";
    case FENC_E_NON_POSITIVE_PRICE: return "non_positive_price";
    case FENC_E_EMPTY_QUARTER: return "empty_quarter";
    case FENC_E_CONFIG: return "config_error";
    case FENC_E_IO: return "io_error";
    case FENC_E_NULL_POINTER: return "null_pointer";
    case FENC_E_INTERNAL: return "internal_error";
  }
  return "unknown";
}

int fenc_status_is_numerical(fenc_status status) {
  return status == FENC_E_RANK_DEFICIENT || status == FENC_E_DEGENERATE_VARIANCE ||
         status == FENC_E_SINGULAR_BLOCK || status == FENC_E_DEGENERATE_SPECTRUM;
}

const char* fenc_last_error_message(void) { return last_error.c_str(); }

fenc_status fenc_parse_format(const char* name, fenc_format* out) {
  if (name == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    switch (fenc::parse_report_format(name)) {
      case fenc::ReportFormat::Markdown: *out = FENC_FORMAT_MARKDOWN; break;
      case fenc::ReportFormat::Csv: *out = FENC_FORMAT_CSV; break;
      case fenc::ReportFormat::Json: *out = FENC_FORMAT_JSON; break;
    }
  });
}

fenc_status fenc_parse_centering(const char* name, fenc_centering* out) {
  if (name == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    *out = fenc::parse_centering(name) == fenc::HacConfig::Centering::Full ? FENC_CENTERING_FULL
                                                                            : FENC_CENTERING_SEGMENT;
  });
}

const char* fenc_string_data(const fenc_string* s) { return s == nullptr ? "" : s->text.c_str(); }
size_t fenc_string_size(const fenc_string* s) { return s == nullptr ? 0 : s->text.size(); }
void fenc_string_free(fenc_string* s) { delete s; }

// ---- encompassing test ----

fenc_status fenc_errors_create(const double* e1, const double* e2, size_t n, int h, int64_t k0, fenc_errors** out) {
  if (out == nullptr || (n > 0 && (e1 == nullptr || e2 == nullptr))) return null_error("argument");
  return guarded([&] {
    const auto size = static_cast<Eigen::Index>(n);
    fenc::Vector a = n > 0 ? fenc::Vector(Eigen::Map<const fenc::Vector>(e1, size)) : fenc::Vector();
    fenc::Vector b = n > 0 ? fenc::Vector(Eigen::Map<const fenc::Vector>(e2, size)) : fenc::Vector();
    *out = new fenc_errors{fenc::ForecastErrorSet(std::move(a), std::move(b), h, k0)};
  });
}

fenc_status fenc_errors_load_csv(const char* path, int h, int64_t k0, fenc_errors** out) {
  if (path == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_errors{fenc::load_errors_csv(path, h, k0)}; });
}

size_t fenc_errors_size(const fenc_errors* errors) {
  return errors == nullptr ? 0 : static_cast<size_t>(errors->set.n());
}

void fenc_errors_free(fenc_errors* errors) { delete errors; }

void fenc_test_options_init(fenc_test_options* options) {
  if (options == nullptr) return;
  options->mu0 = 0.45;
  options->bandwidth = 0;
  options->bandwidth_c = 1.0;
  options->centering = FENC_CENTERING_SEGMENT;
}

fenc_status fenc_encompassing_test(const fenc_errors* errors, const fenc_test_options* options,
                                   fenc_test_result* out) {
  if (errors == nullptr || options == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    const fenc::EncompassingResult r =
        fenc::encompassing_test(errors->set, options->mu0, hac_from(options->bandwidth, options->bandwidth_c, options->centering));
    *out = fenc_test_result{r.statistic, r.p_value, r.dbar,  r.omega2, r.mse1,     r.mse2,
                            r.classic_moment, r.mu0, r.n, r.m0,     r.bandwidth};
  });
}

// ---- Monte Carlo ----

fenc_status fenc_experiment_load(const char* path, fenc_experiment** out) {
  if (path == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_experiment{fenc::load_experiment(path)}; });
}

fenc_status fenc_experiment_parse(const char* text, const char* source, fenc_experiment** out) {
  if (text == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    *out = new fenc_experiment{fenc::parse_experiment(text, source == nullptr ? "<config>" : source)};
  });
}

int fenc_experiment_is_power(const fenc_experiment* experiment) {
  return experiment != nullptr && experiment->experiment.kind == fenc::ExperimentKind::Power;
}

size_t fenc_experiment_cell_count(const fenc_experiment* experiment) {
  return experiment == nullptr ? 0 : experiment->experiment.cells.size();
}

fenc_status fenc_experiment_set_reps(fenc_experiment* experiment, int64_t reps) {
  if (experiment == nullptr) return null_error("experiment");
  if (reps < 1) return set_error(FENC_E_INVALID_ARGUMENT, "reps must be >= 1");
  experiment->experiment.reps = reps;
  return FENC_OK;
}

fenc_status fenc_experiment_set_seed(fenc_experiment* experiment, uint64_t seed) {
  if (experiment == nullptr) return null_error("experiment");
  experiment->experiment.seed = seed;
  return FENC_OK;
}

fenc_status fenc_experiment_describe(const fenc_experiment* experiment, fenc_string** out) {
  if (experiment == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_string{fenc::describe_experiment(experiment->experiment)}; });
}

fenc_status fenc_experiment_run(const fenc_experiment* experiment, int threads, fenc_report** out) {
  if (experiment == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_report{fenc::run_experiment(experiment->experiment, threads)}; });
}

void fenc_experiment_free(fenc_experiment* experiment) { delete experiment; }

size_t fenc_report_cell_count(const fenc_report* report) {
  return report == nullptr ? 0 : report->report.cells.size();
}

fenc_status fenc_report_cell(const fenc_report* report, size_t index, fenc_cell_summary* out) {
  if (report == nullptr || out == nullptr) return null_error("argument");
  if (index >= report->report.cells.size()) return set_error(FENC_E_INVALID_ARGUMENT, "cell index out of range");
  const fenc::CellReport& c = report->report.cells[index];
  *out = fenc_cell_summary{c.label.c_str(),         c.reps, c.rejections, c.failures, c.rejection_frequency,
                           c.mc_standard_error, c.unreliable ? 1 : 0};
  return FENC_OK;
}

fenc_status fenc_report_render(const fenc_report* report, fenc_format format, fenc_string** out) {
  if (report == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_string{fenc::render_report(report->report, to_format(format))}; });
}

void fenc_report_free(fenc_report* report) { delete report; }

// ---- local power ----

fenc_status fenc_power_blocks_create(size_t k1, size_t k2, const double* c, const double* b11, const double* b12,
                                     const double* b22, fenc_power_blocks** out) {
  if (out == nullptr || c == nullptr || b11 == nullptr || b12 == nullptr || b22 == nullptr) {
    return null_error("argument");
  }
  if (k1 == 0 || k2 == 0) return set_error(FENC_E_INVALID_ARGUMENT, "block dimensions must be positive");
  return guarded([&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto n1 = static_cast<Eigen::Index>(k1);
    const auto n2 = static_cast<Eigen::Index>(k2);
    fenc::LocalPowerInput in;
    in.c = Eigen::Map<const fenc::Vector>(c, n2);
    in.b11 = Eigen::Map<const RowMajor>(b11, n1, n1);
    in.b12 = Eigen::Map<const RowMajor>(b12, n1, n2);
    in.b21 = in.b12.transpose();
    in.b22 = Eigen::Map<const RowMajor>(b22, n2, n2);
    *out = new fenc_power_blocks{std::move(in)};
  });
}

fenc_status fenc_power_blocks_load_json(const char* path, fenc_power_blocks** out) {
  if (path == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    std::ifstream file(path, std::ios::binary);
    if (!file) fenc::fail(fenc::ErrorCode::IoError, std::string("cannot open blocks file '") + path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(file);
    } catch (const nlohmann::json::exception& e) {
      fenc::fail(fenc::ErrorCode::ParseError, std::string(path) + ": " + e.what());
    }
    if (!doc.is_object()) fenc::fail(fenc::ErrorCode::ParseError, std::string(path) + ": expected a JSON object");
    for (const auto& item : doc.items()) {
      const std::string& key = item.key();
      if (key != "c" && key != "b11" && key != "b12" && key != "b21" && key != "b22") {
        fenc::fail(fenc::ErrorCode::ParseError, std::string(path) + ": unknown key \"" + key + "\"");
      }
    }
    fenc::LocalPowerInput in;
    const Eigen::MatrixXd c = json_matrix(doc, "c", path);
    if (c.rows() != 1 && c.cols() != 1) fenc::fail(fenc::ErrorCode::ParseError, std::string(path) + ": \"c\" must be a vector");
    in.c = c.reshaped();
    in.b11 = json_matrix(doc, "b11", path);
    in.b12 = json_matrix(doc, "b12", path);
    in.b21 = doc.contains("b21") ? json_matrix(doc, "b21", path) : Eigen::MatrixXd(in.b12.transpose());
    in.b22 = json_matrix(doc, "b22", path);
    *out = new fenc_power_blocks{std::move(in)};
  });
}

void fenc_power_blocks_free(fenc_power_blocks* blocks) { delete blocks; }

void fenc_local_power_options_init(fenc_local_power_options* options) {
  if (options == nullptr) return;
  *options = fenc_local_power_options{0.45, 0.25, 1.0, 0.10, 1.0, 0};
}

fenc_status fenc_local_power(const fenc_power_blocks* blocks, const fenc_local_power_options* options,
                             fenc_local_power_result* out) {
  if (blocks == nullptr || options == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] {
    fenc::LocalPowerInput in = blocks->input;
    in.c *= options->c_scale;
    in.mu0 = options->mu0;
    in.pi0 = options->pi0;
    in.phi2 = options->phi2;
    in.level = options->level;
    const fenc::LocalPower r = options->mild ? fenc::local_power_mild(in) : fenc::local_power_stationary(in);
    *out = fenc_local_power_result{r.drift, r.power};
  });
}

// ---- inflation study ----

void fenc_panel_filter_init(fenc_panel_filter* filter) {
  if (filter == nullptr) return;
  *filter = fenc_panel_filter{nullptr, 0, nullptr, nullptr, 80};
}

fenc_status fenc_panel_load(const char* path, const fenc_panel_filter* filter, fenc_panel** out) {
  if (path == nullptr || out == nullptr) return null_error("argument");
  if (filter != nullptr && filter->n_countries > 0 && filter->countries == nullptr) return null_error("countries");
  return guarded([&] {
    fenc::PanelFilter f;
    if (filter != nullptr) {
      for (size_t i = 0; i < filter->n_countries; ++i) {
        if (filter->countries[i] == nullptr) fenc::fail(fenc::ErrorCode::InvalidArgument, "country code is NULL");
        f.countries.emplace_back(filter->countries[i]);
      }
      auto quarter = [](const char* text) -> std::optional<fenc::Quarter> {
        if (text == nullptr) return std::nullopt;
        const auto q = fenc::Quarter::parse(text);
        if (!q) fenc::fail(fenc::ErrorCode::InvalidArgument, std::string("bad quarter '") + text + "'");
        return q;
      };
      f.from = quarter(filter->from);
      f.to = quarter(filter->to);
      f.min_quarters = filter->min_quarters;
    }
    *out = new fenc_panel{fenc::load_panel(path, f)};
  });
}

size_t fenc_panel_country_count(const fenc_panel* panel) {
  return panel == nullptr ? 0 : static_cast<size_t>(panel->panel.country_count());
}

size_t fenc_panel_periods(const fenc_panel* panel) {
  return panel == nullptr ? 0 : static_cast<size_t>(panel->panel.periods());
}

const char* fenc_panel_country(const fenc_panel* panel, size_t index) {
  if (panel == nullptr || index >= panel->panel.countries().size()) return nullptr;
  return panel->panel.countries()[index].c_str();
}

void fenc_panel_free(fenc_panel* panel) { delete panel; }

void fenc_study_options_init(fenc_study_options* options) {
  static const double default_mu0[] = {0.40, 0.45};
  if (options == nullptr) return;
  *options = fenc_study_options{4, 0.25, 4, 8, default_mu0, 2, 0, 1.0, FENC_CENTERING_SEGMENT, 0};
}

fenc_status fenc_study_run(const fenc_panel* panel, const fenc_study_options* options, int threads,
                           fenc_study** out) {
  if (panel == nullptr || options == nullptr || out == nullptr) return null_error("argument");
  if (options->n_mu0 > 0 && options->mu0 == nullptr) return null_error("mu0");
  return guarded([&] {
    fenc::CountryStudyConfig config;
    config.h = options->h;
    config.pi0 = options->pi0;
    config.p2 = options->p2;
    config.p_max = options->p_max;
    config.mu0_list.assign(options->mu0, options->mu0 + options->n_mu0);
    config.hac = hac_from(options->bandwidth, options->bandwidth_c, options->centering);
    config.exclude_own = options->exclude_own != 0;
    *out = new fenc_study{fenc::run_study(panel->panel, config, threads)};
  });
}

size_t fenc_study_country_count(const fenc_study* study) { return study == nullptr ? 0 : study->study.rows.size(); }

size_t fenc_study_failure_count(const fenc_study* study) {
  if (study == nullptr) return 0;
  size_t failures = 0;
  for (const auto& row : study->study.rows) failures += row.result ? 0 : 1;
  return failures;
}

fenc_status fenc_study_render(const fenc_study* study, fenc_format format, fenc_string** out) {
  if (study == nullptr || out == nullptr) return null_error("argument");
  return guarded([&] { *out = new fenc_string{fenc::render_study(study->study, to_format(format))}; });
}

void fenc_study_free(fenc_study* study) { delete study; }

}  // extern "C"
