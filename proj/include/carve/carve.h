/* C interface to the carve library. All functions return a carve_status;
 * on failure carve_last_error() describes the problem. Handles are opaque
 * and owned by the caller once created. */
#ifndef CARVE_CARVE_H
#define CARVE_CARVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CARVE_API __declspec(dllexport)
#else
#define CARVE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum carve_status {
  CARVE_OK = 0,
  CARVE_ERR_DOMAIN = 1,
  CARVE_ERR_CONFIG = 2,
  CARVE_ERR_BRACKET = 3,
  CARVE_ERR_CONVERGENCE = 4,
  CARVE_ERR_TRUNCATION_MASS = 5,
  CARVE_ERR_RANK = 6,
  CARVE_ERR_CONSISTENCY = 7,
  CARVE_ERR_IO = 8,
  CARVE_ERR_NULL_ARGUMENT = 9,
  CARVE_ERR_INTERNAL = 10
} carve_status;

/* Message for the most recent failure on the calling thread; "" if none. */
CARVE_API const char* carve_last_error(void);
CARVE_API const char* carve_status_name(carve_status status);
CARVE_API const char* carve_version(void);

/* ---- Normal and bivariate normal ------------------------------------- */

CARVE_API carve_status carve_norm_cdf(double x, double mu, double sigma2, double* out);
CARVE_API carve_status carve_owens_t(double h, double a, double* out);
/* method: owen, cox1, cox2_mc, drezner1, drezner2, mc_genz; NULL means owen. */
CARVE_API carve_status carve_bvn_cdf(double x1, double x2, double rho, const char* method,
                                     double* out);

/* ---- Truncated normal ------------------------------------------------- */

typedef struct carve_tnorm_params {
  double mu;
  double sigma2;
  double a; /* may be -INFINITY */
  double b; /* may be INFINITY */
} carve_tnorm_params;

CARVE_API carve_status carve_tnorm_cdf(const carve_tnorm_params* p, double x, double* out);
CARVE_API carve_status carve_tnorm_sf(const carve_tnorm_params* p, double x, double* out);
CARVE_API carve_status carve_tnorm_pdf(const carve_tnorm_params* p, double x, double* out);
CARVE_API carve_status carve_tnorm_ppf(const carve_tnorm_params* p, double prob, double* out);
CARVE_API carve_status carve_tnorm_mean(const carve_tnorm_params* p, double* out);
/* Equal-tailed interval for mu from one draw x_obs of TN(mu, sigma2, a, b). */
CARVE_API carve_status carve_tnorm_ci(double x_obs, double sigma2, double a, double b,
                                      double alpha, double* lo, double* hi);

/* ---- Sum of a normal and a truncated normal --------------------------- */

/* Z = c1 X1 + c2 X2, X1 ~ N(mu1, tau1_2), X2 ~ TN(mu2, tau2_2, a, b). */
typedef struct carve_sntn_inputs {
  double mu1;
  double tau1_2;
  double mu2;
  double tau2_2;
  double a;
  double b;
  double c1;
  double c2;
} carve_sntn_inputs;

typedef struct carve_sntn carve_sntn;

typedef enum carve_tail { CARVE_TAIL_LEFT = 0, CARVE_TAIL_RIGHT = 1, CARVE_TAIL_TWO_SIDED = 2 } carve_tail;

CARVE_API carve_status carve_sntn_create(const carve_sntn_inputs* in, carve_sntn** out);
CARVE_API void carve_sntn_free(carve_sntn* d);
CARVE_API carve_status carve_sntn_cdf(const carve_sntn* d, double z, double* out);
CARVE_API carve_status carve_sntn_sf(const carve_sntn* d, double z, double* out);
CARVE_API carve_status carve_sntn_pdf(const carve_sntn* d, double z, double* out);
CARVE_API carve_status carve_sntn_ppf(const carve_sntn* d, double p, double tol, double* out);
CARVE_API carve_status carve_sntn_mean(const carve_sntn* d, double* out);
CARVE_API carve_status carve_sntn_rho(const carve_sntn* d, double* out);
CARVE_API carve_status carve_sntn_pvalue(const carve_sntn* d, double z, carve_tail tail,
                                         double* out);
/* Interval for a common mean mu1 = mu2 = mu; requires c1 + c2 = 1. */
CARVE_API carve_status carve_sntn_ci(const carve_sntn_inputs* tmpl, double z_obs, double alpha,
                                     double* lo, double* hi);

/* ---- Matrices ---------------------------------------------------------- */

typedef struct carve_matrix carve_matrix;

/* Numeric CSV; a non-numeric first row is kept as column names. */
CARVE_API carve_status carve_matrix_read_csv(const char* path, carve_matrix** out);
/* Row-major data. */
CARVE_API carve_status carve_matrix_from_rows(const double* data, size_t rows, size_t cols,
                                              carve_matrix** out);
CARVE_API size_t carve_matrix_rows(const carve_matrix* m);
CARVE_API size_t carve_matrix_cols(const carve_matrix* m);
CARVE_API carve_status carve_matrix_get(const carve_matrix* m, size_t i, size_t j, double* out);
CARVE_API void carve_matrix_free(carve_matrix* m);

/* ---- Result tables ---------------------------------------------------- */

typedef struct carve_table carve_table;

typedef enum carve_format { CARVE_FORMAT_CSV = 0, CARVE_FORMAT_JSON = 1 } carve_format;

CARVE_API size_t carve_table_rows(const carve_table* t);
CARVE_API size_t carve_table_cols(const carve_table* t);
/* Column name, or NULL when j is out of range. */
CARVE_API const char* carve_table_column(const carve_table* t, size_t j);
CARVE_API carve_status carve_table_number(const carve_table* t, size_t i, size_t j, double* out);
/* Text cell; the pointer lives as long as the table. */
CARVE_API carve_status carve_table_text(const carve_table* t, size_t i, size_t j,
                                        const char** out);
CARVE_API carve_status carve_table_write(const carve_table* t, carve_format format,
                                         const char* path);
/* Serialized table; the pointer is valid until the next call on `t` or its release. */
CARVE_API carve_status carve_table_serialize(carve_table* t, carve_format format,
                                             const char** out);
CARVE_API void carve_table_free(carve_table* t);

/* ---- Carving analysis of user data ------------------------------------ */

typedef struct carve_analyze_options {
  double frac_b;   /* inference fraction */
  double alpha;
  double sigma2;   /* <= 0: estimate by cross-validated Lasso */
  double lam_frac; /* Lasso: lam = lam_frac * lambda_max; used when k <= 0 */
  int k;           /* > 0: marginal screening of the top k features */
  uint64_t seed;
} carve_analyze_options;

CARVE_API void carve_analyze_options_default(carve_analyze_options* o);
/* Columns: feature, method, estimate, pvalue, ci_lo, ci_hi, v_minus, v_plus, rho. */
CARVE_API carve_status carve_analyze(const carve_matrix* X, const carve_matrix* y,
                                     const carve_analyze_options* o, carve_table** out);

/* ---- Experiments -------------------------------------------------------- */

typedef struct carve_power_options {
  int n;
  const int* n_a; /* NULL: every n_a in 1..n-1 */
  size_t n_a_count;
  const double* mu; /* NULL: 0, 0.05, ..., 1 */
  size_t mu_count;
  double sigma2;
  double alpha;
  double threshold;
} carve_power_options;

CARVE_API void carve_power_options_default(carve_power_options* o);
CARVE_API carve_status carve_simulate_sample_mean(const carve_power_options* o,
                                                  carve_table** out);

typedef struct carve_hdr_options {
  int n;
  int p;
  int s;
  double sigma2;
  double alpha;
  const double* snr; /* log10 SNR grid; NULL keeps the default */
  size_t snr_count;
  const double* frac_b; /* NULL keeps the default */
  size_t frac_count;
  int n_sims;
  uint64_t base_seed;
  const char* algorithm; /* "lasso" or "screen" */
  double lam_frac;
  int k;
  int threads; /* 0: one per hardware thread */
  int full_scale; /* nonzero: seven SNR points and 500 runs */
} carve_hdr_options;

CARVE_API void carve_hdr_options_default(carve_hdr_options* o);
CARVE_API carve_status carve_simulate_hdr(const carve_hdr_options* o, carve_table** out);

typedef struct carve_diabetes_options {
  const char* data;
  const char* target;
  double lam_value;
  int literal_lambda; /* nonzero: lam_value on unit-norm columns, else a fraction of lambda_max */
  const double* frac_b;
  size_t frac_count;
  double alpha;
  uint64_t seed;
} carve_diabetes_options;

typedef struct carve_diabetes_summary {
  double lam;
  double sigma2;
  int cv_support;
} carve_diabetes_summary;

CARVE_API void carve_diabetes_options_default(carve_diabetes_options* o);
/* `cis` gets the interval table; `selection` (optional) the full-data
 * Lasso selection with columns index, feature. */
CARVE_API carve_status carve_analyze_diabetes(const carve_diabetes_options* o, carve_table** cis,
                                              carve_table** selection,
                                              carve_diabetes_summary* summary);

/* ---- Benchmarks --------------------------------------------------------- */

CARVE_API carve_status carve_bench_bvn(size_t grid_size, uint64_t seed, uint64_t oracle_samples,
                                       uint64_t mc_samples, carve_table** out);
CARVE_API carve_status carve_bench_rootfind(size_t n_intervals, double alpha, uint64_t seed,
                                            carve_table** out);

#ifdef __cplusplus
}
#endif

#endif /* CARVE_CARVE_H */
