// Command-line front end. Talks to the library only through the C interface.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fenc/fenc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

// Carries a library status out of a subcommand.
struct Failure {
  fenc_status status;
  std::string message;
};

void check(fenc_status status) {
  if (status != FENC_OK) throw Failure{status, fenc_last_error_message()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using StringHandle = Handle<fenc_string, fenc_string_free>;
using ErrorsHandle = Handle<fenc_errors, fenc_errors_free>;
using ExperimentHandle = Handle<fenc_experiment, fenc_experiment_free>;
using ReportHandle = Handle<fenc_report, fenc_report_free>;
using BlocksHandle = Handle<fenc_power_blocks, fenc_power_blocks_free>;
using PanelHandle = Handle<fenc_panel, fenc_panel_free>;
using StudyHandle = Handle<fenc_study, fenc_study_free>;

std::string take(fenc_string* raw) {
  StringHandle s(raw);
  return std::string(fenc_string_data(s.get()), fenc_string_size(s.get()));
}

// Shortest text that reads back to the same double.
std::string exact(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Output {
  std::string format = "markdown";
  std::string out;

  fenc_format resolved() const {
    fenc_format f = FENC_FORMAT_MARKDOWN;
    check(fenc_parse_format(format.c_str(), &f));
    return f;
  }

  void write(const std::string& text) const {
    if (out.empty() || out == "-") {
      std::cout << text << std::flush;
      return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw Failure{FENC_E_IO, "cannot write '" + out + "'"};
    file << text;
    if (!file) throw Failure{FENC_E_IO, "failed writing '" + out + "'"};
  }
};

void add_output_flags(CLI::App* cmd, Output& o) {
  cmd->add_option("--format", o.format, "Output format: markdown, csv or json")
      ->check(CLI::IsMember({"markdown", "md", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Write the result to this file instead of stdout");
}

void add_centering_flag(CLI::App* cmd, std::string& centering) {
  cmd->add_option("--centering", centering, "Demean the HAC terms per segment or over the full sample")
      ->check(CLI::IsMember({"segment", "full"}))
      ->capture_default_str();
}

void echo(const std::string& text) { std::cerr << text << std::flush; }

std::string echo_line(const std::string& key, const std::string& value) { return "# " + key + " = " + value + "\n"; }

// ---- test ----

struct TestArgs {
  std::string file;
  double mu0 = 0.45;
  std::optional<long long> bandwidth;
  double bandwidth_c = 1.0;
  std::string centering = "segment";
  int h = 1;
  long long k0 = 1;
  Output output;
};

int run_test(const TestArgs& a) {
  std::string cfg = echo_line("command", "test") + echo_line("errors", a.file) + echo_line("mu0", exact(a.mu0)) +
                    (a.bandwidth ? echo_line("bandwidth", std::to_string(*a.bandwidth))
                                 : echo_line("bandwidth_c", exact(a.bandwidth_c))) +
                    echo_line("centering", a.centering) + echo_line("h", std::to_string(a.h)) + echo_line("k0", std::to_string(a.k0)) +
                    echo_line("format", a.output.format);
  echo(cfg);
  const fenc_format format = a.output.resolved();

  fenc_errors* raw = nullptr;
  check(fenc_errors_load_csv(a.file.c_str(), a.h, a.k0, &raw));
  ErrorsHandle errors(raw);
  fenc_test_options opts;
  fenc_test_options_init(&opts);
  opts.mu0 = a.mu0;
  opts.bandwidth = a.bandwidth.value_or(0);
  opts.bandwidth_c = a.bandwidth_c;
  check(fenc_parse_centering(a.centering.c_str(), &opts.centering));
  if (a.bandwidth && *a.bandwidth < 1) throw Failure{FENC_E_BANDWIDTH_OUT_OF_RANGE, "--bandwidth must be >= 1"};
  fenc_test_result r{};
  check(fenc_encompassing_test(errors.get(), &opts, &r));

  const std::vector<std::pair<std::string, double>> values{
      {"statistic", r.statistic}, {"p_value", r.p_value}, {"dbar", r.dbar},
      {"omega2", r.omega2},       {"mse1", r.mse1},       {"mse2", r.mse2},
      {"classic_moment", r.classic_moment}, {"mu0", r.mu0}};
  const std::vector<std::pair<std::string, long long>> counts{{"n", r.n}, {"m0", r.m0}, {"bandwidth", r.bandwidth}};
  std::ostringstream out;
  if (format == FENC_FORMAT_CSV) {
    bool first = true;
    for (const auto& [k, v] : values) out << (first ? "" : ",") << k, first = false;
    for (const auto& [k, v] : counts) out << ',' << k;
    out << '\n';
    first = true;
    for (const auto& [k, v] : values) out << (first ? "" : ",") << exact(v), first = false;
    for (const auto& [k, v] : counts) out << ',' << v;
    out << '\n';
  } else if (format == FENC_FORMAT_JSON) {
    out << "{\n";
    for (const auto& [k, v] : values) out << "  \"" << k << "\": " << exact(v) << ",\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out << "  \"" << counts[i].first << "\": " << counts[i].second << (i + 1 < counts.size() ? ",\n" : "\n");
    }
    out << "}\n";
  } else {
    out << "| quantity | value |\n|---|---|\n";
    for (const auto& [k, v] : values) out << "| " << k << " | " << human(v) << " |\n";
    for (const auto& [k, v] : counts) out << "| " << k << " | " << v << " |\n";
  }
  a.output.write(out.str());
  return kExitOk;
}

// ---- mc-size / mc-power ----

struct McArgs {
  std::string config;
  std::optional<long long> reps;
  std::optional<unsigned long long> seed;
  int threads = 0;
  Output output;
};

int run_mc(const McArgs& a, bool power) {
  fenc_experiment* raw = nullptr;
  check(fenc_experiment_load(a.config.c_str(), &raw));
  ExperimentHandle ex(raw);
  if ((fenc_experiment_is_power(ex.get()) != 0) != power) {
    throw Failure{FENC_E_CONFIG, a.config + ": kind: this file describes a " +
                                     std::string(power ? "size" : "power") + " experiment; use mc-" +
                                     (power ? "size" : "power")};
  }
  if (a.reps) check(fenc_experiment_set_reps(ex.get(), *a.reps));
  if (a.seed) check(fenc_experiment_set_seed(ex.get(), *a.seed));
  fenc_string* desc = nullptr;
  check(fenc_experiment_describe(ex.get(), &desc));
  echo(echo_line("command", power ? "mc-power" : "mc-size") + echo_line("threads", std::to_string(a.threads)) +
       echo_line("format", a.output.format));
  std::istringstream lines(take(desc));
  for (std::string line; std::getline(lines, line);) echo("# " + line + "\n");
  const fenc_format format = a.output.resolved();

  fenc_report* rep = nullptr;
  check(fenc_experiment_run(ex.get(), a.threads, &rep));
  ReportHandle report(rep);
  fenc_string* text = nullptr;
  check(fenc_report_render(report.get(), format, &text));
  a.output.write(take(text));
  return kExitOk;
}

// ---- local-power ----

struct PowerArgs {
  std::string blocks;
  std::vector<double> mu0{0.45};
  std::vector<double> mu0_range;
  std::vector<double> c_scale{1.0};
  double pi0 = 0.25;
  double phi2 = 1.0;
  double level = 0.10;
  bool mild = false;
  double c = 1.0;
  double b11 = 1.0;
  double b12 = 0.0;
  double b22 = 1.0;
  Output output;
};

int run_local_power(const PowerArgs& a) {
  std::vector<double> mus = a.mu0;
  if (!a.mu0_range.empty()) {
    const double lo = a.mu0_range[0];
    const double hi = a.mu0_range[1];
    const double step = a.mu0_range[2];
    if (!(step > 0.0) || !(hi >= lo)) throw Failure{FENC_E_INVALID_ARGUMENT, "--mu0-range needs lo <= hi and step > 0"};
    mus.clear();
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) mus.push_back(lo + static_cast<double>(i) * step);
  }

  std::string cfg = echo_line("command", "local-power");
  if (a.blocks.empty()) {
    cfg += echo_line("c", exact(a.c)) + echo_line("b11", exact(a.b11)) + echo_line("b12", exact(a.b12)) +
           echo_line("b22", exact(a.b22));
  } else {
    cfg += echo_line("blocks", a.blocks);
  }
  cfg += echo_line("pi0", exact(a.pi0)) + echo_line("phi2", exact(a.phi2)) + echo_line("level", exact(a.level)) +
         echo_line("predictors", a.mild ? "mildly integrated" : "stationary") + echo_line("format", a.output.format);
  echo(cfg);
  const fenc_format format = a.output.resolved();

  fenc_power_blocks* raw = nullptr;
  if (a.blocks.empty()) {
    check(fenc_power_blocks_create(1, 1, &a.c, &a.b11, &a.b12, &a.b22, &raw));
  } else {
    check(fenc_power_blocks_load_json(a.blocks.c_str(), &raw));
  }
  BlocksHandle blocks(raw);

  struct Row {
    double mu0, scale, drift, power;
  };
  std::vector<Row> rows;
  for (const double scale : a.c_scale) {
    for (const double mu0 : mus) {
      fenc_local_power_options opts;
      fenc_local_power_options_init(&opts);
      opts.mu0 = mu0;
      opts.pi0 = a.pi0;
      opts.phi2 = a.phi2;
      opts.level = a.level;
      opts.c_scale = scale;
      opts.mild = a.mild ? 1 : 0;
      fenc_local_power_result r{};
      check(fenc_local_power(blocks.get(), &opts, &r));
      rows.push_back({mu0, scale, r.drift, r.power});
    }
  }

  std::ostringstream out;
  if (format == FENC_FORMAT_CSV) {
    out << "mu0,c_scale,drift,power\n";
    for (const Row& r : rows) out << exact(r.mu0) << ',' << exact(r.scale) << ',' << exact(r.drift) << ',' << exact(r.power) << '\n';
  } else if (format == FENC_FORMAT_JSON) {
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      out << "  {\"mu0\": " << exact(r.mu0) << ", \"c_scale\": " << exact(r.scale) << ", \"drift\": " << exact(r.drift)
          << ", \"power\": " << exact(r.power) << (i + 1 < rows.size() ? "},\n" : "}\n");
    }
    out << "]\n";
  } else {
    out << "| mu0 | c scale | drift | power |\n|---|---|---|---|\n";
    for (const Row& r : rows) {
      out << "| " << human(r.mu0) << " | " << human(r.scale) << " | " << human(r.drift) << " | " << human(r.power)
          << " |\n";
    }
  }
  a.output.write(out.str());
  return kExitOk;
}

// ---- inflation ----

struct InflationArgs {
  std::string panel;
  int h = 4;
  int p2 = 4;
  int p_max = 8;
  double pi0 = 0.25;
  std::vector<double> mu0{0.40, 0.45};
  std::optional<long long> bandwidth;
  double bandwidth_c = 1.0;
  std::string centering = "segment";
  std::vector<std::string> countries;
  std::string from;
  std::string to;
  long long min_quarters = 80;
  bool exclude_own = false;
  int threads = 0;
  Output output;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (const double x : v) s += (s.empty() ? "" : ", ") + exact(x);
  return "[" + s + "]";
}

int run_inflation(const InflationArgs& a) {
  std::string countries;
  for (const auto& c : a.countries) countries += (countries.empty() ? "" : ",") + c;
  echo(echo_line("command", "inflation") + echo_line("panel", a.panel) +
       echo_line("countries", countries.empty() ? "all" : countries) +
       echo_line("from", a.from.empty() ? "start" : a.from) + echo_line("to", a.to.empty() ? "end" : a.to) +
       echo_line("min_quarters", std::to_string(a.min_quarters)) + echo_line("h", std::to_string(a.h)) +
       echo_line("pi0", exact(a.pi0)) + echo_line("p2", std::to_string(a.p2)) +
       echo_line("p_max", std::to_string(a.p_max)) + echo_line("mu0", join(a.mu0)) +
       (a.bandwidth ? echo_line("bandwidth", std::to_string(*a.bandwidth))
                    : echo_line("bandwidth_c", exact(a.bandwidth_c))) +
       echo_line("centering", a.centering) + echo_line("exclude_own", a.exclude_own ? "true" : "false") + echo_line("threads", std::to_string(a.threads)) +
       echo_line("format", a.output.format));
  const fenc_format format = a.output.resolved();

  std::vector<const char*> codes;
  for (const auto& c : a.countries) codes.push_back(c.c_str());
  fenc_panel_filter filter;
  fenc_panel_filter_init(&filter);
  filter.countries = codes.empty() ? nullptr : codes.data();
  filter.n_countries = codes.size();
  filter.from = a.from.empty() ? nullptr : a.from.c_str();
  filter.to = a.to.empty() ? nullptr : a.to.c_str();
  filter.min_quarters = a.min_quarters;
  fenc_panel* raw_panel = nullptr;
  check(fenc_panel_load(a.panel.c_str(), &filter, &raw_panel));
  PanelHandle panel(raw_panel);

  if (a.bandwidth && *a.bandwidth < 1) throw Failure{FENC_E_BANDWIDTH_OUT_OF_RANGE, "--bandwidth must be >= 1"};
  fenc_study_options opts;
  fenc_study_options_init(&opts);
  opts.h = a.h;
  opts.pi0 = a.pi0;
  opts.p2 = a.p2;
  opts.p_max = a.p_max;
  opts.mu0 = a.mu0.data();
  opts.n_mu0 = a.mu0.size();
  opts.bandwidth = a.bandwidth.value_or(0);
  opts.bandwidth_c = a.bandwidth_c;
  check(fenc_parse_centering(a.centering.c_str(), &opts.centering));
  opts.exclude_own = a.exclude_own ? 1 : 0;
  fenc_study* raw_study = nullptr;
  check(fenc_study_run(panel.get(), &opts, a.threads, &raw_study));
  StudyHandle study(raw_study);
  fenc_string* text = nullptr;
  check(fenc_study_render(study.get(), format, &text));
  a.output.write(take(text));
  const std::size_t failed = fenc_study_failure_count(study.get());
  if (failed > 0) std::cerr << "# " << failed << " of " << fenc_study_country_count(study.get()) << " countries failed; see the table\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-sample forecast encompassing tests for nested models"};
  app.require_subcommand(1);
  // "--h" is the horizon, so help is only reachable as --help.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", fenc_version());

  TestArgs test;
  auto* cmd_test = app.add_subcommand("test", "Run the encompassing test on a CSV of paired forecast errors");
  cmd_test->add_option("errors", test.file, "CSV with header and columns e1 (benchmark), e2 (larger model)")
      ->required();
  cmd_test->add_option("--mu0", test.mu0, "Sample split fraction")->capture_default_str();
  auto* bw = cmd_test->add_option("--bandwidth", test.bandwidth, "Fixed Bartlett bandwidth M");
  cmd_test->add_option("--bandwidth-c", test.bandwidth_c, "Automatic bandwidth constant c in floor(c n^(1/3))")
      ->capture_default_str()
      ->excludes(bw);
  add_centering_flag(cmd_test, test.centering);
  cmd_test->add_option("--h", test.h, "Forecast horizon")->capture_default_str();
  cmd_test->add_option("--k0", test.k0, "First forecast origin")->capture_default_str();
  add_output_flags(cmd_test, test.output);

  McArgs size_args;
  McArgs power_args;
  auto add_mc = [&](const char* name, const char* help, McArgs& m) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("config", m.config, "Experiment file")->required();
    cmd->add_option("--reps", m.reps, "Replications per cell (overrides the file)");
    cmd->add_option("--seed", m.seed, "Base seed (overrides the file)");
    cmd->add_option("--threads", m.threads, "Worker threads; 0 uses all cores")->capture_default_str();
    add_output_flags(cmd, m.output);
    return cmd;
  };
  auto* cmd_size = add_mc("mc-size", "Empirical size experiment", size_args);
  auto* cmd_power = add_mc("mc-power", "Empirical power experiment", power_args);

  PowerArgs lp;
  auto* cmd_lp = app.add_subcommand("local-power", "Asymptotic drift and local power");
  cmd_lp->add_option("blocks", lp.blocks, "JSON file with c, b11, b12, b22 (scalar flags are used otherwise)");
  auto* mu_opt = cmd_lp->add_option("--mu0", lp.mu0, "Split fraction(s)")->capture_default_str();
  cmd_lp->add_option("--mu0-range", lp.mu0_range, "Grid lo hi step over mu0")->expected(3)->excludes(mu_opt);
  cmd_lp->add_option("--c-scale", lp.c_scale, "Multiplier(s) applied to c")->capture_default_str();
  cmd_lp->add_option("--pi0", lp.pi0, "Share of the sample before the first forecast")->capture_default_str();
  cmd_lp->add_option("--phi2", lp.phi2, "Long-run variance of the squared errors")->capture_default_str();
  cmd_lp->add_option("--level", lp.level, "Nominal level")->capture_default_str();
  cmd_lp->add_flag("--mild", lp.mild, "Mildly integrated predictors");
  cmd_lp->add_option("--c", lp.c, "Scalar drift coefficient")->capture_default_str();
  cmd_lp->add_option("--b11", lp.b11, "Scalar B11")->capture_default_str();
  cmd_lp->add_option("--b12", lp.b12, "Scalar B12 = B21")->capture_default_str();
  cmd_lp->add_option("--b22", lp.b22, "Scalar B22")->capture_default_str();
  add_output_flags(cmd_lp, lp.output);

  InflationArgs inf;
  auto* cmd_inf = app.add_subcommand("inflation", "Global versus local inflation forecasts per country");
  cmd_inf->add_option("panel", inf.panel, "CSV with header country,date,hcpi")->required();
  cmd_inf->add_option("--h", inf.h, "Forecast horizon in quarters")->capture_default_str();
  cmd_inf->add_option("--p2", inf.p2, "Highest global inflation lag")->capture_default_str();
  cmd_inf->add_option("--p-max", inf.p_max, "Largest own lag considered by BIC")->capture_default_str();
  cmd_inf->add_option("--pi0", inf.pi0, "Share of the sample before the first forecast")->capture_default_str();
  cmd_inf->add_option("--mu0", inf.mu0, "Split fraction; repeat for several")->capture_default_str();
  auto* ibw = cmd_inf->add_option("--bandwidth", inf.bandwidth, "Fixed Bartlett bandwidth M");
  cmd_inf->add_option("--bandwidth-c", inf.bandwidth_c, "Automatic bandwidth constant")
      ->capture_default_str()
      ->excludes(ibw);
  add_centering_flag(cmd_inf, inf.centering);
  cmd_inf->add_option("--countries", inf.countries, "Restrict to these country codes")->delimiter(',');
  cmd_inf->add_option("--from", inf.from, "First quarter, YYYY-Qq");
  cmd_inf->add_option("--to", inf.to, "Last quarter, YYYY-Qq");
  cmd_inf->add_option("--min-quarters", inf.min_quarters, "Minimum contiguous quarters per country")
      ->capture_default_str();
  cmd_inf->add_flag("--exclude-own", inf.exclude_own, "Leave the country itself out of the global average");
  cmd_inf->add_option("--threads", inf.threads, "Worker threads; 0 uses all cores")->capture_default_str();
  add_output_flags(cmd_inf, inf.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (cmd_test->parsed()) return run_test(test);
    if (cmd_size->parsed()) return run_mc(size_args, false);
    if (cmd_power->parsed()) return run_mc(power_args, true);
    if (cmd_lp->parsed()) return run_local_power(lp);
    if (cmd_inf->parsed()) return run_inflation(inf);
  } catch (const Failure& f) {
    std::cerr << "error (" << fenc_status_name(f.status) << "): " << f.message << '\n';
    return fenc_status_is_numerical(f.status) ? kExitNumerical : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
