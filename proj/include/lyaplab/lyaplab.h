/* C interface to the lyaplab library.
 *
 * Every fallible call returns an lyl_status; on failure the message is
 * available from lyl_last_error() on the same thread until the next call.
 * Output arrays are caller-allocated with the sizes stated next to each call.
 * Handles are opaque and must be released with the matching *_free.
 */
#ifndef LYAPLAB_H
#define LYAPLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LYAPLAB_BUILDING)
#    define LYL_API __declspec(dllexport)
#  else
#    define LYL_API __declspec(dllimport)
#  endif
#else
#  define LYL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lyl_status {
  LYL_OK = 0,
  LYL_ERR_CONFIG = 1,    /* malformed model or arguments description */
  LYL_ERR_DOMAIN = 2,    /* argument outside the operation's domain */
  LYL_ERR_NUMERICAL = 3, /* non-converged quadrature, clamp violation, ... */
  LYL_ERR_INTERNAL = 4
} lyl_status;

LYL_API const char* lyl_last_error(void);
LYL_API const char* lyl_version(void);
/* Releases strings returned through char** out-parameters. */
LYL_API void lyl_string_free(char* s);

typedef struct lyl_complex {
  double re;
  double im;
} lyl_complex;

/* ---- models ---------------------------------------------------------- */

typedef struct lyl_model lyl_model;

/* JSON model descriptor, e.g. {"kind":"stdmap","lambda":50}. */
LYL_API lyl_status lyl_model_from_json(const char* json, lyl_model** out);
/* Resolved descriptor with every default filled in. */
LYL_API lyl_status lyl_model_to_json(const lyl_model* m, char** out);
LYL_API void lyl_model_free(lyl_model* m);
LYL_API double lyl_model_lambda(const lyl_model* m);
LYL_API lyl_status lyl_model_potential_range(const lyl_model* m, double* lo, double* hi);
/* V(n0..n1) of ensemble member `member`; out holds n1 - n0 + 1 values. */
LYL_API lyl_status lyl_potential(const lyl_model* m, int64_t n0, int64_t n1, uint64_t seed,
                                 uint64_t member, double* out);

/* Support [lo, hi] of a JSON distribution descriptor. */
LYL_API lyl_status lyl_distribution_support(const char* dist_json, double* lo, double* hi);
/* Largest density of the continuous part on [lo, hi]; +inf if an atom lies inside. */
LYL_API lyl_status lyl_distribution_max_density(const char* dist_json, double lo, double hi,
                                                double* out);

/* ---- dynamics ------------------------------------------------------- */

/* x_{-1}, x_0, ..., x_{n_steps}; out holds n_steps + 2 values. */
LYL_API lyl_status lyl_std_map_orbit(double x_prev, double x_curr, double lambda,
                                     int64_t n_steps, double* out);
LYL_API lyl_status lyl_pendulum_residual(double x_prev, double x_curr, double x_next,
                                         double lambda, double* out);

/* ---- Lyapunov exponents ---------------------------------------------- */

typedef struct lyl_lyapunov_estimate {
  double gamma;
  double std_error;
  int64_t steps;
  int64_t ensemble;
} lyl_lyapunov_estimate;

/* out holds `count` estimates. workers = 0 uses every hardware thread. */
LYL_API lyl_status lyl_lyapunov_scan(const lyl_model* m, const double* energies, size_t count,
                                     int64_t n, int64_t b, uint64_t seed, unsigned workers,
                                     lyl_lyapunov_estimate* out);
LYL_API lyl_status lyl_periodic_oracle(const double* values, size_t period, double e,
                                       double lambda, double* out);

/* ---- density of states ---------------------------------------------- */

typedef struct lyl_histogram lyl_histogram;

LYL_API lyl_status lyl_dos_histogram(const lyl_model* m, int64_t n, int64_t b,
                                     const double* edges, size_t n_edges, uint64_t seed,
                                     unsigned workers, lyl_histogram** out);
/* edges has bins + 1 entries, mass has bins entries; mass is normalized. */
LYL_API lyl_status lyl_histogram_create(const double* edges, const double* mass, size_t bins,
                                        lyl_histogram** out);
LYL_API void lyl_histogram_free(lyl_histogram* h);
LYL_API size_t lyl_histogram_bins(const lyl_histogram* h);
/* edges: bins + 1 values, mass: bins values; either may be NULL. */
LYL_API void lyl_histogram_data(const lyl_histogram* h, double* edges, double* mass);
LYL_API int lyl_histogram_coverage_warning(const lyl_histogram* h);
LYL_API lyl_status lyl_histogram_cumulative(const lyl_histogram* h, double e, double* out);
/* out holds bins + 1 values. */
LYL_API lyl_status lyl_uniform_edges(double lo, double hi, size_t bins, double* out);

LYL_API lyl_status lyl_stieltjes(const lyl_histogram* h, double e, double delta,
                                 lyl_complex* out);

typedef struct lyl_green_average {
  lyl_complex mean_g;
  lyl_complex std_error_g;
  double mean_abs_g_alpha;
  double std_error_abs_g_alpha;
  double mean_im_g_alpha;
  int64_t samples;
  int64_t clamp_violations;
} lyl_green_average;

LYL_API lyl_status lyl_green_avg(const lyl_model* m, double e, double delta,
                                 int64_t window_half, int64_t b, uint64_t seed,
                                 double moment_alpha, unsigned workers, lyl_green_average* out);

typedef struct lyl_window_bound {
  double e0;
  double delta;
  double moment_alpha;
  double bound;
  double std_error;
  int64_t samples;
  int64_t clamp_violations;
} lyl_window_bound;

LYL_API lyl_status lyl_frac_moment_bound(const lyl_model* m, double e0, double delta,
                                         double moment_alpha, int64_t window_half, int64_t b,
                                         uint64_t seed, unsigned workers, lyl_window_bound* out);
LYL_API lyl_status lyl_empirical_window_mass(const lyl_model* m, double e0, double delta,
                                             int64_t n, int64_t b, uint64_t seed,
                                             unsigned workers, double* mean, double* std_error);

/* ---- Thouless formula ------------------------------------------------ */

LYL_API lyl_status lyl_log_potential(const lyl_histogram* h, double e, double* out);
LYL_API lyl_status lyl_thouless_gamma(const lyl_histogram* h, double e, double lambda,
                                      double* out);
/* out holds bins + 1 values. */
LYL_API lyl_status lyl_spectrum_edges(const lyl_model* m, size_t bins, double* out);

typedef struct lyl_thouless_budget {
  int64_t transfer_n;
  int64_t transfer_b;
  int64_t dos_n;
  int64_t dos_b;
  size_t bins;
} lyl_thouless_budget;

typedef struct lyl_thouless_row {
  double e;
  double gamma_transfer;
  double std_error_transfer;
  double gamma_thouless;
  double residual;
} lyl_thouless_row;

LYL_API lyl_thouless_budget lyl_thouless_budget_default(void);
LYL_API lyl_status lyl_thouless_scan(const lyl_model* m, const double* grid, size_t count,
                                     const lyl_thouless_budget* budget, uint64_t seed,
                                     unsigned workers, lyl_thouless_row* out);

/* ---- bounds ---------------------------------------------------------- */

typedef struct lyl_prop31_inputs {
  double ln_lambda;
  double t;
  double xi;
  double delta;
  double g;
} lyl_prop31_inputs;

typedef struct lyl_bound_report {
  lyl_prop31_inputs inputs;
  double raw_bound;
  double log_raw_bound;
  double clamped_bound;
  int vacuous;
} lyl_bound_report;

LYL_API lyl_status lyl_prop31_bound(const lyl_prop31_inputs* in, lyl_bound_report* out);
/* Rows (e[k], gamma[k]) on a uniform energy grid. */
LYL_API lyl_status lyl_measure_zt(const double* e, const double* gamma, size_t count, double t,
                                  double e0, double delta, double* out);
LYL_API lyl_status lyl_prop2_rhs(double a_density, double delta, double xi, int64_t m,
                                 double* out);
/* Distributions are JSON, e.g. {"kind":"uniform","lo":0,"hi":1}. */
LYL_API lyl_status lyl_prop2_mc(const char* dist_json, int64_t m, double e, double delta,
                                double lambda, lyl_complex a, double xi, int64_t samples,
                                uint64_t seed, unsigned workers, double* mean,
                                double* std_error);

typedef struct lyl_lemma_check {
  double lhs;
  double lhs_err;
  double rhs;
} lyl_lemma_check;

LYL_API lyl_status lyl_lemma_bdddens_check(double a_density, double delta, double e,
                                           const char* dist_json, lyl_lemma_check* out);
LYL_API lyl_status lyl_lemma_split_check(double a_density, double delta, double e, double xi,
                                         const char* dist_json, double a, lyl_lemma_check* out);
LYL_API lyl_status lyl_empirical_g(const lyl_histogram* h, double e0, double delta, double xi,
                                   double* out);

/* ---- resonance and quadrature ------------------------------------------ */

typedef struct lyl_quad_tolerance {
  double abs;
  double rel;
} lyl_quad_tolerance;

typedef struct lyl_quad_result {
  double value;
  double err_est;
  int converged;
  int divergent;
  int64_t subdivisions;
} lyl_quad_result;

LYL_API lyl_status lyl_delta3(double x0, double x1, double e, double delta, double lambda,
                              int drop_coupling, lyl_complex* out);
LYL_API lyl_status lyl_theta(double x0, double lambda, double* out);
/* tol may be NULL for the defaults. */
LYL_API lyl_status lyl_j_integral(double e, double th, double moment_alpha, double eps,
                                  const lyl_quad_tolerance* tol, lyl_quad_result* out);
LYL_API lyl_status lyl_k_integral(double lambda, double b, double e, double moment_alpha,
                                  const lyl_quad_tolerance* tol, lyl_quad_result* out);
LYL_API lyl_status lyl_i_integral(double lambda, double e, double delta, double a_cut,
                                  double moment_alpha, const lyl_quad_tolerance* tol,
                                  lyl_quad_result* out);
LYL_API lyl_status lyl_excluded_measure(double lambda, double e, double delta, double a_cut,
                                        double* out);
/* Writes up to `capacity` roots; *count receives the total number. */
LYL_API lyl_status lyl_hbar_roots(double lambda, double b, double* out, size_t capacity,
                                  size_t* count);

typedef struct lyl_lambda_class {
  double lambda;
  double lambda_bar;
  double delta_exp;
  double distance;
  int resonant;
} lyl_lambda_class;

/* Resonance offsets are {0, pi}. */
LYL_API lyl_status lyl_classify_lambda(double lambda, double delta_exp, lyl_lambda_class* out);
LYL_API lyl_status lyl_next_regular_lambda(double lambda, double delta_exp, double step,
                                           double* out);
LYL_API lyl_status lyl_quadr_bound_check(lyl_complex d, double moment_alpha, double* out);

/* ---- invariant suite ------------------------------------------------ */

typedef void (*lyl_verify_callback)(const char* name, int passed, const char* detail,
                                    void* user);

/* Calls `cb` once per check; *failures receives the number of failed checks. */
LYL_API lyl_status lyl_verify(uint64_t seed, unsigned workers, lyl_verify_callback cb,
                              void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif /* LYAPLAB_H */
