/* C interface to the fenc forecast encompassing library.
 *
 * Every object is an opaque handle created by a *_create/_load/_parse/_run
 * call and released by the matching *_free (which accepts NULL). Functions
 * that can fail return a fenc_status; on failure the out-parameter is left
 * untouched and fenc_last_error_message() describes the problem for the
 * calling thread until its next failing call.
 */
#ifndef FENC_FENC_H
#define FENC_FENC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FENC_BUILDING_LIBRARY)
#define FENC_API __declspec(dllexport)
#else
#define FENC_API __declspec(dllimport)
#endif
#else
#define FENC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fenc_status {
  FENC_OK = 0,
  FENC_E_INVALID_ARGUMENT = 1,
  FENC_E_EMPTY_INPUT = 2,
  FENC_E_RANK_DEFICIENT = 3,
  FENC_E_INSUFFICIENT_DATA = 4,
  FENC_E_INVALID_SPLIT = 5,
  FENC_E_BANDWIDTH_OUT_OF_RANGE = 6,
  FENC_E_DEGENERATE_VARIANCE = 7,
  FENC_E_SINGULAR_BLOCK = 8,
  FENC_E_INVALID_SPEC = 9,
  FENC_E_DEGENERATE_SPECTRUM = 10,
  FENC_E_PARSE = 11,
  FENC_E_COVERAGE = 12,
  FENC_E_NON_POSITIVE_PRICE = 13,
  FENC_E_EMPTY_QUARTER = 14,
  FENC_E_CONFIG = 15,
  FENC_E_IO = 16,
  FENC_E_NULL_POINTER = 17,
  FENC_E_INTERNAL = 18
} fenc_status;

FENC_API const char* fenc_version(void);
FENC_API const char* fenc_status_name(fenc_status status);
/* Nonzero when the failure came from the data (rank deficiency, degenerate
 * variance, singular blocks, degenerate spectra) rather than invalid input. */
FENC_API int fenc_status_is_numerical(fenc_status status);
FENC_API const char* fenc_last_error_message(void);

typedef enum fenc_format { FENC_FORMAT_MARKDOWN = 0, FENC_FORMAT_CSV = 1, FENC_FORMAT_JSON = 2 } fenc_format;

/* Accepts "markdown", "md", "csv" and "json". */
FENC_API fenc_status fenc_parse_format(const char* name, fenc_format* out);

/* ---- owned text ------------------------------------------------------------ */

typedef struct fenc_string fenc_string;

FENC_API const char* fenc_string_data(const fenc_string* s);
FENC_API size_t fenc_string_size(const fenc_string* s);
FENC_API void fenc_string_free(fenc_string* s);

/* ---- encompassing test ------------------------------------------------------ */

typedef struct fenc_errors fenc_errors;

/* e1: benchmark errors, e2: nesting model errors. */
FENC_API fenc_status fenc_errors_create(const double* e1, const double* e2, size_t n, int h, int64_t k0,
                                        fenc_errors** out);
/* Two-column CSV with a header row. */
FENC_API fenc_status fenc_errors_load_csv(const char* path, int h, int64_t k0, fenc_errors** out);
FENC_API size_t fenc_errors_size(const fenc_errors* errors);
FENC_API void fenc_errors_free(fenc_errors* errors);

/* How the moment terms are demeaned before the Bartlett sum: by the mean of
 * their own segment (default) or by the full-sample mean. */
typedef enum fenc_centering { FENC_CENTERING_SEGMENT = 0, FENC_CENTERING_FULL = 1 } fenc_centering;

/* Accepts "segment" and "full". */
FENC_API fenc_status fenc_parse_centering(const char* name, fenc_centering* out);

typedef struct fenc_test_options {
  double mu0;
  /* Fixed Bartlett bandwidth when > 0, otherwise floor(bandwidth_c * n^(1/3)). */
  int64_t bandwidth;
  double bandwidth_c;
  fenc_centering centering;
} fenc_test_options;

typedef struct fenc_test_result {
  double statistic;
  double p_value;
  double dbar;
  double omega2;
  double mse1;
  double mse2;
  double classic_moment;
  double mu0;
  int64_t n;
  int64_t m0;
  int64_t bandwidth;
} fenc_test_result;

/* mu0 = 0.45, automatic bandwidth with c = 1, segment centering. */
FENC_API void fenc_test_options_init(fenc_test_options* options);
FENC_API fenc_status fenc_encompassing_test(const fenc_errors* errors, const fenc_test_options* options,
                                            fenc_test_result* out);

/* ---- Monte Carlo --------------------------------------------------------------- */

typedef struct fenc_experiment fenc_experiment;
typedef struct fenc_report fenc_report;

FENC_API fenc_status fenc_experiment_load(const char* path, fenc_experiment** out);
FENC_API fenc_status fenc_experiment_parse(const char* text, const char* source, fenc_experiment** out);
/* Nonzero for power experiments. */
FENC_API int fenc_experiment_is_power(const fenc_experiment* experiment);
FENC_API size_t fenc_experiment_cell_count(const fenc_experiment* experiment);
FENC_API fenc_status fenc_experiment_set_reps(fenc_experiment* experiment, int64_t reps);
FENC_API fenc_status fenc_experiment_set_seed(fenc_experiment* experiment, uint64_t seed);
/* Resolved settings, one "key = value" per line. */
FENC_API fenc_status fenc_experiment_describe(const fenc_experiment* experiment, fenc_string** out);
/* threads <= 0 uses every hardware thread; results do not depend on it. */
FENC_API fenc_status fenc_experiment_run(const fenc_experiment* experiment, int threads, fenc_report** out);
FENC_API void fenc_experiment_free(fenc_experiment* experiment);

typedef struct fenc_cell_summary {
  const char* label; /* valid while the report lives */
  int64_t reps;
  int64_t rejections;
  int64_t failures;
  double rejection_frequency;
  double mc_standard_error;
  int unreliable;
} fenc_cell_summary;

FENC_API size_t fenc_report_cell_count(const fenc_report* report);
FENC_API fenc_status fenc_report_cell(const fenc_report* report, size_t index, fenc_cell_summary* out);
FENC_API fenc_status fenc_report_render(const fenc_report* report, fenc_format format, fenc_string** out);
FENC_API void fenc_report_free(fenc_report* report);

/* ---- local power ------------------------------------------------------------------ */

typedef struct fenc_power_blocks fenc_power_blocks;

/* Row-major blocks: b11 is k1 x k1, b12 is k1 x k2, b22 is k2 x k2 and c has
 * k2 entries. B21 is taken to be the transpose of B12. */
FENC_API fenc_status fenc_power_blocks_create(size_t k1, size_t k2, const double* c, const double* b11,
                                              const double* b12, const double* b22, fenc_power_blocks** out);
/* JSON object with arrays "c", "b11", "b12", "b22" and optionally "b21". */
FENC_API fenc_status fenc_power_blocks_load_json(const char* path, fenc_power_blocks** out);
FENC_API void fenc_power_blocks_free(fenc_power_blocks* blocks);

typedef struct fenc_local_power_options {
  double mu0;
  double pi0;
  double phi2;
  double level;
  double c_scale; /* multiplies c, for curves over the drift size */
  int mild;       /* nonzero: mildly integrated predictors */
} fenc_local_power_options;

typedef struct fenc_local_power_result {
  double drift;
  double power;
} fenc_local_power_result;

/* mu0 = 0.45, pi0 = 0.25, phi2 = 1, level = 0.10, c_scale = 1, stationary. */
FENC_API void fenc_local_power_options_init(fenc_local_power_options* options);
FENC_API fenc_status fenc_local_power(const fenc_power_blocks* blocks, const fenc_local_power_options* options,
                                      fenc_local_power_result* out);

/* ---- inflation study --------------------------------------------------------------- */

typedef struct fenc_panel fenc_panel;
typedef struct fenc_study fenc_study;

typedef struct fenc_panel_filter {
  const char* const* countries; /* NULL or n_countries codes */
  size_t n_countries;
  const char* from; /* "YYYY-Qq" or NULL */
  const char* to;
  int64_t min_quarters;
} fenc_panel_filter;

/* All countries, full date range, 80 quarters minimum. */
FENC_API void fenc_panel_filter_init(fenc_panel_filter* filter);
FENC_API fenc_status fenc_panel_load(const char* path, const fenc_panel_filter* filter, fenc_panel** out);
FENC_API size_t fenc_panel_country_count(const fenc_panel* panel);
FENC_API size_t fenc_panel_periods(const fenc_panel* panel);
/* Three-letter code, valid while the panel lives. */
FENC_API const char* fenc_panel_country(const fenc_panel* panel, size_t index);
FENC_API void fenc_panel_free(fenc_panel* panel);

typedef struct fenc_study_options {
  int h;
  double pi0;
  int p2;
  int p_max;
  const double* mu0; /* n_mu0 split fractions */
  size_t n_mu0;
  int64_t bandwidth; /* fixed when > 0 */
  double bandwidth_c;
  fenc_centering centering;
  int exclude_own;
} fenc_study_options;

/* h = 4, pi0 = 0.25, p2 = 4, p_max = 8, mu0 = {0.40, 0.45}, automatic bandwidth,
 * segment centering. */
FENC_API void fenc_study_options_init(fenc_study_options* options);
FENC_API fenc_status fenc_study_run(const fenc_panel* panel, const fenc_study_options* options, int threads,
                                    fenc_study** out);
FENC_API size_t fenc_study_country_count(const fenc_study* study);
/* Number of countries whose evaluation failed; details are in the rendering. */
FENC_API size_t fenc_study_failure_count(const fenc_study* study);
FENC_API fenc_status fenc_study_render(const fenc_study* study, fenc_format format, fenc_string** out);
FENC_API void fenc_study_free(fenc_study* study);

#ifdef __cplusplus
}
#endif

#endif /* FENC_FENC_H */
