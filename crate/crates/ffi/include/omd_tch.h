#ifndef OMD_TCH_H
#define OMD_TCH_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum OmdStatus {
  OMD_STATUS_OK = 0,
  OMD_STATUS_NULL_POINTER = 1,
  OMD_STATUS_INVALID_ARGUMENT = 2,
  OMD_STATUS_DIMENSION_MISMATCH = 3,
  OMD_STATUS_NON_FINITE = 4,
  OMD_STATUS_NADIR_VIOLATION = 5,
  OMD_STATUS_ARCHIVE_ERROR = 6,
  OMD_STATUS_PANIC = 7,
} OmdStatus;

/**
 * Solver method, in the order of the `omd-tch` CLI names.
 */
typedef enum OmdMethod {
  OMD_METHOD_LS = 0,
  OMD_METHOD_TCH = 1,
  OMD_METHOD_STCH = 2,
  OMD_METHOD_OMD_GD = 3,
  OMD_METHOD_OMD_EG = 4,
  OMD_METHOD_ADA_OMD_GD = 5,
  OMD_METHOD_ADA_OMD_EG = 6,
} OmdMethod;

typedef enum OmdBoundVariant {
  OMD_BOUND_VARIANT_PGD_PGD = 0,
  OMD_BOUND_VARIANT_PGD_EG = 1,
} OmdBoundVariant;

/**
 * Opaque Pareto archive.
 */
typedef struct OmdArchive OmdArchive;

/**
 * Opaque problem handle.
 */
typedef struct OmdProblem OmdProblem;

/**
 * Opaque solve result.
 */
typedef struct OmdResult OmdResult;

/**
 * Solver settings. `theta_box <= 0` means no box.
 */
typedef struct OmdSolverConfig {
  enum OmdMethod method;
  size_t rounds;
  double eta_theta;
  double eta_lambda;
  double mu;
  uint64_t seed;
  double init_scale;
  double theta_box;
} OmdSolverConfig;

typedef struct OmdBoundConstants {
  double u;
  double l;
  double r_theta;
  size_t d;
  size_t m;
  size_t t;
} OmdBoundConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Error message of the most recent call on this thread, or NULL when that
 * call succeeded. Valid until the next call into the library from the same thread.
 */
const char *omd_last_error_message(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum OmdStatus omd_problem_vlmop2_new(size_t d, struct OmdProblem **out_problem);

/**
 * Two isotropic quadratics with seeded random anchors.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OmdStatus omd_problem_quadratic_new(size_t d, uint64_t seed, struct OmdProblem **out_problem);

/**
 * # Safety
 * `problem` must come from a `omd_problem_*_new` call and not be used afterwards.
 */
void omd_problem_free(struct OmdProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle; out pointers must be valid for writes.
 */
enum OmdStatus omd_problem_shape(const struct OmdProblem *problem, size_t *out_m, size_t *out_d);

/**
 * Writes f(θ) into `out_f[0..m]`.
 *
 * # Safety
 * Arrays must hold the given number of elements.
 */
enum OmdStatus omd_problem_evaluate(const struct OmdProblem *problem,
                                    const double *theta,
                                    size_t d,
                                    double *out_f,
                                    size_t m);

/**
 * Defaults used by the CLI for `method`.
 */
struct OmdSolverConfig omd_solver_config_default(enum OmdMethod method);

/**
 * # Safety
 * `config` and `preference[0..m]` must be readable; `out_result` writable.
 */
enum OmdStatus omd_solve(const struct OmdProblem *problem,
                         const struct OmdSolverConfig *config,
                         const double *preference,
                         size_t m,
                         struct OmdResult **out_result);

/**
 * # Safety
 * `result` must come from `omd_solve` and not be used afterwards.
 */
void omd_result_free(struct OmdResult *result);

/**
 * Number of recorded rounds.
 *
 * # Safety
 * `result` must be a live handle.
 */
enum OmdStatus omd_result_rounds(const struct OmdResult *result, size_t *out_rounds);

/**
 * Output solution (θ̃ for adaptive methods, θ̄ otherwise) and its objectives.
 *
 * # Safety
 * `out_theta[0..d]` and `out_f[0..m]` must be writable.
 */
enum OmdStatus omd_result_output(const struct OmdResult *result,
                                 double *out_theta,
                                 size_t d,
                                 double *out_f,
                                 size_t m);

/**
 * Objectives and combination weights recorded in round `round` (1-based).
 *
 * # Safety
 * `out_f[0..m]` and `out_lambda[0..m]` must be writable.
 */
enum OmdStatus omd_result_trace_row(const struct OmdResult *result,
                                    size_t round,
                                    double *out_f,
                                    double *out_lambda,
                                    size_t m);

/**
 * # Safety
 * `out_archive` must be writable.
 */
enum OmdStatus omd_archive_new(bool merge_duplicates, struct OmdArchive **out_archive);

/**
 * # Safety
 * `archive` must come from `omd_archive_new` and not be used afterwards.
 */
void omd_archive_free(struct OmdArchive *archive);

/**
 * Inserts the iterate of `round`. `out_added` is set to 1 when the candidate
 * entered the archive (or was merged into an equal member), 0 when discarded.
 *
 * # Safety
 * Arrays must hold the given number of elements; `out_added` may be NULL.
 */
enum OmdStatus omd_archive_insert(struct OmdArchive *archive,
                                  uint64_t round,
                                  const double *theta,
                                  size_t d,
                                  const double *objectives,
                                  size_t m,
                                  int32_t *out_added);

/**
 * # Safety
 * `archive` must be a live handle; out pointers writable.
 */
enum OmdStatus omd_archive_stats(const struct OmdArchive *archive,
                                 size_t *out_len,
                                 double *out_total_weight);

/**
 * Weighted average of the archived decisions.
 *
 * # Safety
 * `out_theta[0..d]` must be writable.
 */
enum OmdStatus omd_archive_output(const struct OmdArchive *archive, double *out_theta, size_t d);

/**
 * Euclidean projection of `v[0..n]` onto the probability simplex.
 *
 * # Safety
 * `v` readable and `out[0..n]` writable; they may alias.
 */
enum OmdStatus omd_project_simplex(const double *v, size_t n, double *out_w);

/**
 * max_i w_i (f_i - z_i); `nadir` may be NULL for the origin.
 *
 * # Safety
 * Arrays must hold `m` elements.
 */
enum OmdStatus omd_tch_value(const double *f,
                             const double *w,
                             const double *nadir,
                             size_t m,
                             double *out_value);

/**
 * # Safety
 * Pointers must be valid.
 */
enum OmdStatus omd_optimal_step_sizes(enum OmdBoundVariant v,
                                      const struct OmdBoundConstants *c,
                                      double *out_eta_theta,
                                      double *out_eta_lambda);

/**
 * Expected-value bound; pass `gamma` in (0, 1) for the high-probability
 * bound or a non-positive value to omit that term.
 *
 * # Safety
 * Pointers must be valid.
 */
enum OmdStatus omd_convergence_bound(enum OmdBoundVariant v,
                                     const struct OmdBoundConstants *c,
                                     double gamma,
                                     double *out_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMD_TCH_H */
