/* rsmkit — response-surface fitting, sphere-constrained optimization, and
 * uncertainty of the optimum.
 *
 * C interface to the rsmkit core. All entry points return a status code;
 * results come back through opaque handles or caller-provided buffers.
 * On failure the thread-local message from rsm_last_error() describes
 * what went wrong. Strings returned through char** are heap-allocated and
 * must be released with rsm_string_free(); handles with the matching
 * *_free() call. Handles are immutable after creation and safe to share
 * across threads.
 */

#ifndef RSMKIT_H
#define RSMKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsm_status {
  RSM_OK = 0,
  RSM_E_INVALID_ARGUMENT = 1,
  RSM_E_IO = 2,
  RSM_E_PARSE = 3,
  RSM_E_INSUFFICIENT_DATA = 4,
  RSM_E_RANK_DEFICIENT = 5,
  RSM_E_NOT_CONVEX = 6,
  RSM_E_HARD_CASE = 7,
  RSM_E_SINGULAR_JACOBIAN = 8,
  RSM_E_STRICT_COMPLEMENTARITY = 9,
  RSM_E_STATUS_FLIP = 10,
  RSM_E_INTERNAL = 11
} rsm_status;

/* Stable identifier for a status, e.g. "RankDeficient". */
const char* rsm_status_name(rsm_status status);

/* Message from the most recent failing call on this thread. */
const char* rsm_last_error(void);

void rsm_string_free(char* text);

/* ---- datasets ------------------------------------------------------- */

typedef struct rsm_dataset rsm_dataset;

/* points is row-major runs x factors. */
rsm_status rsm_dataset_create(int factors, int runs, const double* points,
                              const double* response, rsm_dataset** out);
/* CSV with header x1,...,xn,y; see rsm_last_error() for row/column on
 * parse failures. */
rsm_status rsm_dataset_parse_csv(const char* text, rsm_dataset** out);
rsm_status rsm_dataset_read_csv(const char* path, rsm_dataset** out);
int rsm_dataset_factors(const rsm_dataset* data);
int rsm_dataset_runs(const rsm_dataset* data);
void rsm_dataset_free(rsm_dataset* data);

/* ---- surfaces ------------------------------------------------------- */

typedef struct rsm_surface rsm_surface;

/* coefficients holds the packed vector (intercept, linear, squared,
 * cross terms), length 1 + n + n(n+1)/2. */
rsm_status rsm_surface_create(int factors, const double* coefficients, rsm_surface** out);
/* JSON file {"n": ..., "beta": [...]}. */
rsm_status rsm_surface_read_json(const char* path, rsm_surface** out);
int rsm_surface_factors(const rsm_surface* surface);
int rsm_surface_coefficient_count(const rsm_surface* surface);
rsm_status rsm_surface_coefficients(const rsm_surface* surface, double* out);
rsm_status rsm_surface_predict(const rsm_surface* surface, const double* x, double* out);
void rsm_surface_free(rsm_surface* surface);

/* ---- least squares fit ---------------------------------------------- */

typedef struct rsm_fit_result rsm_fit_result;

rsm_status rsm_fit(const rsm_dataset* data, rsm_fit_result** out);
int rsm_fit_result_factors(const rsm_fit_result* fit);
int rsm_fit_result_coefficient_count(const rsm_fit_result* fit);
int rsm_fit_result_dof(const rsm_fit_result* fit);
double rsm_fit_result_sigma2(const rsm_fit_result* fit);
rsm_status rsm_fit_result_coefficients(const rsm_fit_result* fit, double* out);
/* Row-major p x p covariance of the fitted coefficients. */
rsm_status rsm_fit_result_covariance(const rsm_fit_result* fit, double* out);
rsm_status rsm_fit_result_surface(const rsm_fit_result* fit, rsm_surface** out);
rsm_status rsm_fit_result_json(const rsm_fit_result* fit, char** out);
void rsm_fit_result_free(rsm_fit_result* fit);

/* ---- constrained optimum -------------------------------------------- */

typedef struct rsm_critical_point rsm_critical_point;

#define RSM_STATUS_INTERIOR 0
#define RSM_STATUS_BOUNDARY 1

/* Minimizes the surface over ||x|| <= radius. Surfaces whose quadratic
 * part is not positive definite are rejected unless allow_nonconvex is
 * nonzero. */
rsm_status rsm_solve(const rsm_surface* surface, double radius, int allow_nonconvex,
                     rsm_critical_point** out);
int rsm_critical_point_factors(const rsm_critical_point* point);
rsm_status rsm_critical_point_x(const rsm_critical_point* point, double* out);
double rsm_critical_point_multiplier(const rsm_critical_point* point);
/* RSM_STATUS_INTERIOR or RSM_STATUS_BOUNDARY. */
int rsm_critical_point_status(const rsm_critical_point* point);
int rsm_critical_point_extension(const rsm_critical_point* point);
int rsm_critical_point_strict_complementarity(const rsm_critical_point* point);
/* stationarity, primal, complementarity, dual. */
rsm_status rsm_critical_point_residuals(const rsm_critical_point* point, double out[4]);
rsm_status rsm_critical_point_json(const rsm_critical_point* point, char** out);
void rsm_critical_point_free(rsm_critical_point* point);

/* ---- sensitivity of the optimum ------------------------------------- */

typedef struct rsm_sensitivity rsm_sensitivity;

/* Closed form matching the point's status. */
rsm_status rsm_sensitivity_compute(const rsm_surface* surface, const rsm_critical_point* point,
                                   rsm_sensitivity** out);
/* Boundary sensitivities through the bordered KKT solve. */
rsm_status rsm_sensitivity_bordered(const rsm_surface* surface, const rsm_critical_point* point,
                                    rsm_sensitivity** out);
/* Central differences of the full solver; step is scaled per coordinate. */
rsm_status rsm_sensitivity_finite_difference(const rsm_surface* surface, double radius,
                                             double step, int allow_nonconvex,
                                             rsm_sensitivity** out);
int rsm_sensitivity_rows(const rsm_sensitivity* sensitivity);
int rsm_sensitivity_cols(const rsm_sensitivity* sensitivity);
/* Row-major n x p derivative of the optimum in the coefficients. */
rsm_status rsm_sensitivity_dxdbeta(const rsm_sensitivity* sensitivity, double* out);
/* 1 when the multiplier derivative is available (boundary case). */
int rsm_sensitivity_has_dlambda(const rsm_sensitivity* sensitivity);
rsm_status rsm_sensitivity_dlambdadbeta(const rsm_sensitivity* sensitivity, double* out);
const char* rsm_sensitivity_method(const rsm_sensitivity* sensitivity);
rsm_status rsm_sensitivity_json(const rsm_sensitivity* sensitivity, char** out);
void rsm_sensitivity_free(rsm_sensitivity* sensitivity);

/* ---- asymptotic covariance and intervals ---------------------------- */

typedef struct rsm_asymptotics rsm_asymptotics;

rsm_status rsm_asymptotics_compute(const rsm_critical_point* point,
                                   const rsm_sensitivity* sensitivity,
                                   const rsm_fit_result* fit, double level,
                                   rsm_asymptotics** out);
int rsm_asymptotics_factors(const rsm_asymptotics* report);
/* Row-major n x n delta-method covariance of the optimum. */
rsm_status rsm_asymptotics_covariance(const rsm_asymptotics* report, double* out);
rsm_status rsm_asymptotics_std_errors(const rsm_asymptotics* report, double* out);
/* Row-major n x 2 (lower, upper) per coordinate. */
rsm_status rsm_asymptotics_intervals(const rsm_asymptotics* report, double* out);
rsm_status rsm_asymptotics_json(const rsm_asymptotics* report, char** out);
void rsm_asymptotics_free(rsm_asymptotics* report);

/* ---- Monte Carlo study ---------------------------------------------- */

typedef struct rsm_mc_study rsm_mc_study;

/* Repeatedly simulates responses from the truth surface over the design's
 * factor settings (its response column is ignored), refits, re-solves and
 * rebuilds intervals. Deterministic for a fixed seed. */
rsm_status rsm_monte_carlo(const rsm_surface* truth, double radius, const rsm_dataset* design,
                           double sigma, int replications, uint64_t seed, double level,
                           rsm_mc_study** out);
int rsm_mc_study_factors(const rsm_mc_study* study);
int rsm_mc_study_status_flips(const rsm_mc_study* study);
int rsm_mc_study_solver_errors(const rsm_mc_study* study);
int rsm_mc_study_used(const rsm_mc_study* study);
rsm_status rsm_mc_study_empirical_cov(const rsm_mc_study* study, double* out);
rsm_status rsm_mc_study_coverage(const rsm_mc_study* study, double* out);
rsm_status rsm_mc_study_json(const rsm_mc_study* study, char** out);
/* Per-replication critical points as CSV. */
rsm_status rsm_mc_study_replications_csv(const rsm_mc_study* study, char** out);
void rsm_mc_study_free(rsm_mc_study* study);

/* ---- whole-pipeline reports ----------------------------------------- */

rsm_status rsm_fit_report_json(const rsm_dataset* data, char** out);
rsm_status rsm_optimize_report_json(const rsm_dataset* data, double radius, char** out);
/* Full pipeline: fit, optimum, sensitivities, covariance, intervals and
 * diagnostics. fd_check adds a finite-difference comparison with the
 * given step. */
rsm_status rsm_analyze_report_json(const rsm_dataset* data, double radius, double level,
                                   int fd_check, double fd_step, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RSMKIT_H */
