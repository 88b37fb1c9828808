#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fenc/dgp.hpp"
#include "fenc/encompassing.hpp"
#include "fenc/format.hpp"

namespace fenc {

/// One table entry: a data generating process plus the test settings.
struct McCell {
  std::variant<Dgp1Spec, Dgp2Spec> dgp;
  double pi0 = 0.25;
  double mu0 = 0.45;
  HacConfig hac;
  double level = 0.10;
  std::string label;

  /// Checks the cell, including that the split and bandwidth are valid for
  /// the number of forecasts the design produces.
  void validate() const;
  Index periods() const;
  int horizon() const;
  double beta2() const;
  /// Number of forecast errors n = T - h - k0 + 1.
  Index forecasts() const;
  std::string default_label() const;
};

/// Identifies the simulated data behind a cell. Cells that differ only in the
/// test settings (mu0, level, bandwidth) share a key and are evaluated on the
/// same forecast errors.
std::uint64_t data_key(const McCell& cell);

/// Identifies the underlying shocks. Cells that also differ in beta2 or rho
/// share a key, so comparisons along those axes use common random numbers.
std::uint64_t shock_key(const McCell& cell);

/// Simulates the cell's DGP and returns the nested models' recursive errors.
ForecastErrorSet simulate_forecast_errors(const McCell& cell, const RngStream& rng);

struct ReplicationOutcome {
  bool reject = false;
  double statistic = 0.0;
};

/// One replication. Numerical failures propagate as fenc::Error; the
/// experiment runners count them instead.
ReplicationOutcome run_replication(const McCell& cell, std::uint64_t rep_id, std::uint64_t base_seed);

struct CellReport {
  McCell cell;
  std::string label;
  std::int64_t reps = 0;
  std::int64_t rejections = 0;
  std::int64_t failures = 0;
  double rejection_frequency = 0.0;
  double mc_standard_error = 0.0;
  /// failures / reps >= 1%.
  bool unreliable = false;
};

enum class ExperimentKind { Size, Power };

struct McReport {
  ExperimentKind kind = ExperimentKind::Size;
  std::uint64_t base_seed = 0;
  std::vector<CellReport> cells;
};

/// Runs `reps` replications of every cell on `threads` workers (<= 0 picks the
/// hardware concurrency). Output does not depend on the thread count.
McReport run_size_experiment(std::span<const McCell> cells, std::int64_t reps, std::uint64_t base_seed,
                             int threads = 1);
McReport run_power_experiment(std::span<const McCell> cells, std::int64_t reps, std::uint64_t base_seed,
                              int threads = 1);

/// Raw statistics (NaN for failed replications), in replication order.
std::vector<double> simulate_statistics(const McCell& cell, std::int64_t reps, std::uint64_t base_seed,
                                        int threads = 1);

std::string render_report(const McReport& report, ReportFormat format);

/// Summary columns read back from the CSV rendering.
struct CsvCellRow {
  std::string label;
  std::int64_t reps = 0;
  double rejection_frequency = 0.0;
  double mc_standard_error = 0.0;
  std::int64_t failures = 0;
};
std::vector<CsvCellRow> parse_report_csv(std::string_view text);

/// An experiment file: the cells of a size or power table plus defaults.
struct Experiment {
  ExperimentKind kind = ExperimentKind::Size;
  std::int64_t reps = 10000;
  std::uint64_t seed = 20240601;
  std::string source;
  std::vector<McCell> cells;
};

Experiment parse_experiment(std::string_view text, std::string source = "<config>");
Experiment load_experiment(const std::string& path);

/// Resolved settings, defaults included, one `key = value` per line.
std::string describe_experiment(const Experiment& experiment);

McReport run_experiment(const Experiment& experiment, int threads = 1);

}  // namespace fenc
